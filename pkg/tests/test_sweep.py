import csv
import io
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphadp.accounting import AdpGuarantee, ZcdpGuarantee, adp_to_approx, zcdp_to_approx
from alphadp.errors import DomainError
from alphadp.mechanisms import (
    GaussianMech,
    LaplaceMech,
    RandomizedResponse,
    gaussian_zcdp_rho,
    laplace_adp_epsilon,
)
from alphadp.optimizer import AlphaSearchConfig, adp_cumulative_converted, rdp_cumulative_converted
from alphadp.presets import PRESETS, alpha_reproduction, discrepancy_report, get_preset, run_preset
from alphadp.sweep import (
    SweepTable,
    advanced_gaussian_epsilon,
    iteration_points,
    sweep_cumulative_vs_iterations,
    sweep_mechanism_vs_alpha,
    sweep_optimizer_curves,
)

GRID = [float(a) for a in range(2, 201)]


def interior_argmin(values):
    i = min(range(len(values)), key=values.__getitem__)
    return 0 < i < len(values) - 1


def test_rr_half_is_conversion_floor():
    t = sweep_mechanism_vs_alpha(RandomizedResponse(0.5), GRID, 1e-5)
    assert t.columns == ("alpha", "adp_converted_epsilon", "baseline_epsilon")
    for a, conv, base in t.rows:
        assert conv == pytest.approx(math.log(1e5) / (a - 1), rel=1e-15)
        assert base == 0.0


def test_gaussian_sigma_one_has_interior_minimum():
    t = sweep_mechanism_vs_alpha(GaussianMech(1.0), GRID, 1e-5)
    assert t.metadata["skipped"]  # alphas where e**(a(a-1)/2) overflows
    assert interior_argmin(t.column("adp_converted_epsilon"))


def test_laplace_b4_approaches_pure():
    t = sweep_mechanism_vs_alpha(LaplaceMech(4.0), GRID, 1e-5)
    last = t.rows[-1]
    assert last[0] == 200.0
    assert last[1] == pytest.approx(0.25, rel=0.25)
    assert last[2] == 0.25


def test_empty_grid_rejected():
    with pytest.raises(DomainError):
        sweep_mechanism_vs_alpha(LaplaceMech(1.0), [], 1e-5)


def test_single_iteration_columns_are_single_query_conversions():
    t = sweep_cumulative_vs_iterations(100.0, 1.0, 1e-5, 1)
    n, adp, rdp, zcdp, adv = t.rows[0]
    assert n == 1
    a_adp, a_rdp = t.metadata["alpha_adp"], t.metadata["alpha_rdp"]
    assert adp == adp_cumulative_converted(a_adp, 1, 100.0, 1e-5, 1.0)
    assert rdp == rdp_cumulative_converted(a_rdp, 1, 100.0, 1e-5, 1.0)
    assert zcdp == zcdp_to_approx(ZcdpGuarantee(gaussian_zcdp_rho(100.0, 1.0)), 1e-5).epsilon
    assert adv == advanced_gaussian_epsilon(100.0, 1.0, 1e-5, 1)


def test_cumulative_cells_recompute_from_library():
    t = sweep_cumulative_vs_iterations(50.0, 1.0, 1e-10, 40)
    a = t.metadata["alpha_adp"]
    for row in t.rows:
        assert row[1] == adp_cumulative_converted(a, row[0], 50.0, 1e-10, 1.0)
    assert t.column("iterations") == list(range(1, 41))


def test_per_iteration_alpha_columns():
    t = sweep_cumulative_vs_iterations(100.0, 1.0, 1e-5, 20, per_iteration_alpha=True)
    assert t.columns[-2:] == ("adp_alpha", "rdp_alpha")
    fixed = sweep_cumulative_vs_iterations(100.0, 1.0, 1e-5, 20)
    # re-optimizing can only help
    for r, f in zip(t.rows, fixed.rows):
        assert r[1] <= f[1]


def test_iteration_sampling():
    assert iteration_points(5) == [1, 2, 3, 4, 5]
    assert len(iteration_points(1000)) == 1000
    pts = iteration_points(10**6)
    assert pts[0] == 1 and pts[-1] == 10**6 and len(pts) <= 64
    assert pts == sorted(set(pts))
    with pytest.raises(DomainError):
        iteration_points(0)


def test_optimizer_mode1_interior_minimum():
    t = sweep_optimizer_curves(1000, 1e-5, 1.0, [10.0, 50.0, 100.0], "epsilon_vs_alpha")
    assert t.columns == ("alpha", "sigma_10", "sigma_50", "sigma_100")
    for name in t.columns[1:]:
        assert interior_argmin(t.column(name))


def test_optimizer_mode1_zero_sensitivity_is_residual():
    t = sweep_optimizer_curves(1000, 1e-5, 0.0, [10.0], "epsilon_vs_alpha")
    col = t.column("sigma_10")
    for a, v in zip(t.column("alpha"), col):
        assert v == pytest.approx(math.log(1e5) / (a - 1), rel=1e-14)
    assert all(x > y for x, y in zip(col, col[1:]))


def test_optimizer_mode2_huge_bound_is_flat():
    cfg = AlphaSearchConfig(alpha_max=37)
    t = sweep_optimizer_curves(1000, 1e-5, 1.0, [1e6], "sigma_vs_alpha", cfg)
    assert set(t.column("bound_1e+06")) == {1.0}


def test_optimizer_mode2_skips_unrepresentable_sigma():
    # a(a-1)/2 > 709 from a = 38: the single-query epsilon at sigma 1 overflows
    cfg = AlphaSearchConfig(alpha_min=38, alpha_max=40)
    t = sweep_optimizer_curves(1000, 1e-5, 1.0, [1e6], "sigma_vs_alpha", cfg)
    assert set(t.column("bound_1e+06")) == {2.0}


def test_optimizer_mode2_infeasible_cells_are_absent():
    cfg = AlphaSearchConfig(alpha_max=30, sigma_max=50)
    t = sweep_optimizer_curves(1000, 1e-5, 1.0, [1.0], "sigma_vs_alpha", cfg)
    assert None in t.column("bound_1")
    assert "bound_1" in t.to_csv().splitlines()[0]


@pytest.mark.parametrize("kwargs", [{"mode": "sigma"}, {"targets": []}, {"targets": [1.0, 1.0]},
                                    {"targets": [-1.0]}, {"iterations": 0}])
def test_optimizer_curve_validation(kwargs):
    args = {"iterations": 10, "delta": 1e-5, "l2_sensitivity": 1.0, "targets": [1.0],
            "mode": "epsilon_vs_alpha", **kwargs}
    with pytest.raises(DomainError):
        sweep_optimizer_curves(**args)


# -- table contract ------------------------------------------------------------------------

def test_table_invariants():
    with pytest.raises(DomainError):
        SweepTable(("a", "b"), [(1.0,)], {})
    with pytest.raises(DomainError):
        SweepTable(("a",), [(2.0,), (1.0,)], {})
    with pytest.raises(DomainError):
        SweepTable(("a",), [(1.0,), (1.0,)], {})


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e300, 1e300, allow_nan=False), min_size=1, max_size=20, unique=True))
def test_csv_round_trip_is_exact(xs):
    rows = [(x, x * 0.5, None) for x in sorted(xs)]
    t = SweepTable(("x", "half", "blank"), rows, {})
    parsed = list(csv.reader(io.StringIO(t.to_csv())))
    assert parsed[0] == ["x", "half", "blank"]
    for (x, h, _), rec in zip(rows, parsed[1:]):
        assert float(rec[0]) == x and float(rec[1]) == h and rec[2] == ""
    assert "\r" not in t.to_csv()


def test_json_round_trip():
    t = sweep_mechanism_vs_alpha(RandomizedResponse(0.75), [2.0, 3.0], 1e-5)
    back = json.loads(t.to_json())
    assert back["columns"] == list(t.columns)
    assert [tuple(r) for r in back["rows"]] == list(t.rows)
    assert back["metadata"]["p"] == 0.75


def test_determinism():
    a = run_preset("fig6")
    b = run_preset("fig6")
    assert [(l, t.to_csv(), t.to_json()) for l, t in a] == [(l, t.to_csv(), t.to_json()) for l, t in b]


# -- presets -------------------------------------------------------------------------------------

def test_preset_inventory():
    assert sorted(PRESETS) == [f"fig{i}" for i in range(1, 9)]
    with pytest.raises(DomainError):
        get_preset("fig9")
    labels = [label for label, _ in run_preset("fig1")]
    assert labels == ["p0.55", "p0.75", "p0.9"]


def test_fig4_preset_schema():
    tables = run_preset("fig4")
    assert [l for l, _ in tables] == ["sigma100_delta1e-05", "sigma100_delta1e-10", "sigma100_delta1e-15"]
    for _, t in tables:
        assert t.columns == ("iterations", "adp_epsilon", "rdp_epsilon", "zcdp_epsilon", "advanced_epsilon")
        assert len(t.rows) == 100


def test_preset_overrides():
    (label, t), = run_preset("fig4", delta=1e-7)[:1]
    assert t.metadata["delta"] == 1e-7


def test_alpha_reproduction_report():
    rows = alpha_reproduction(("fig5",))
    assert [r.reported_alpha for r in rows] == [13, 64, 127]
    assert [r.proof_alpha for r in rows] == [16, 22, 27]
    text = discrepancy_report(rows)
    assert "fig5" in text and "127" in text


def test_mechanism_cells_recompute():
    t = sweep_mechanism_vs_alpha(LaplaceMech(2.0), [2.0, 7.0], 1e-5, "statement")
    for a, conv, _ in t.rows:
        want = adp_to_approx(AdpGuarantee(a, laplace_adp_epsilon(2.0, 1.0, a)), 1e-5, "statement").epsilon
        assert conv == want


def test_illustrative_presets_are_flagged():
    flagged = sorted(name for name, p in PRESETS.items() if p.illustrative)
    assert flagged == ["fig3", "fig7", "fig8"]
    (_, t), *_ = run_preset("fig1")
    assert t.metadata["preset"] == "fig1" and t.metadata["illustrative"] is False
