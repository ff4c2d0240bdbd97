"""Tabular sweeps: single-query curves over alpha, cumulative curves over
iterations, and optimizer curves over alpha.

Each cell is produced by a call into ``mechanisms``, ``accounting`` or
``optimizer``; this module only orchestrates and records what it skipped.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .accounting import (
    AdpGuarantee,
    ZcdpGuarantee,
    adp_to_approx,
    advanced_delta_split,
    compose_advanced,
    zcdp_to_approx,
)
from .errors import AlphaDPError, DomainError
from .mechanisms import (
    GaussianMech,
    LaplaceMech,
    MechanismSpec,
    RandomizedResponse,
    adp_epsilon,
    baseline_epsilon,
    gaussian_approx_epsilon,
    gaussian_zcdp_rho,
)
from .optimizer import (
    AlphaSearchConfig,
    adp_cumulative_converted,
    find_alpha_min_epsilon,
    find_alpha_min_epsilon_rdp,
    _validate,
    min_sigma_at_alpha,
    rdp_cumulative_converted,
)

LOG_SAMPLE_THRESHOLD = 1000
LOG_SAMPLE_POINTS = 64
MODES = ("epsilon_vs_alpha", "sigma_vs_alpha")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    # shortest string that parses back to the same double
    return repr(float(v))


@dataclass(frozen=True)
class SweepTable:
    columns: tuple
    rows: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        for r in self.rows:
            if len(r) != len(self.columns):
                raise DomainError(f"row {r!r} does not match columns {self.columns!r}")
        keys = [r[0] for r in self.rows]
        if any(b <= a for a, b in zip(keys, keys[1:])):
            raise DomainError("rows must be strictly increasing in the sweep variable")

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for r in self.rows:
            buf.write(",".join(_fmt(v) for v in r) + "\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows],
                "metadata": self.metadata}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _mech_meta(mech: MechanismSpec) -> dict:
    if isinstance(mech, RandomizedResponse):
        return {"mechanism": "rr", "p": mech.p}
    if isinstance(mech, LaplaceMech):
        return {"mechanism": "laplace", "scale_b": mech.scale_b, "l1_sensitivity": mech.l1_sensitivity}
    if isinstance(mech, GaussianMech):
        return {"mechanism": "gaussian", "sigma": mech.sigma, "l2_sensitivity": mech.l2_sensitivity}
    raise DomainError(f"unknown mechanism {mech!r}")


def sweep_mechanism_vs_alpha(mech: MechanismSpec, alpha_grid: Sequence[float], delta: float,
                             conversion: str = "proof") -> SweepTable:
    """Converted single-query ADP epsilon against the pure or (eps, delta) baseline."""
    grid = [float(a) for a in alpha_grid]
    if not grid:
        raise DomainError("alpha grid is empty")
    baseline = baseline_epsilon(mech, delta)
    rows, skipped = [], []
    for alpha in grid:
        try:
            eps = adp_epsilon(mech, alpha)
            converted = adp_to_approx(AdpGuarantee(alpha, eps), delta, conversion).epsilon
        except AlphaDPError as exc:
            skipped.append({"alpha": alpha, "error": type(exc).__name__})
            continue
        rows.append((alpha, converted, baseline))
    meta = {**_mech_meta(mech), "delta": delta, "conversion": conversion,
            "alpha_grid": grid, "skipped": skipped}
    return SweepTable(("alpha", "adp_converted_epsilon", "baseline_epsilon"), rows, meta)


def iteration_points(max_iterations: int) -> list[int]:
    """Every count up to the threshold; beyond it, log-spaced samples (deduplicated)."""
    if isinstance(max_iterations, bool) or not isinstance(max_iterations, int) or max_iterations < 1:
        raise DomainError(f"max_iterations must be a positive integer, got {max_iterations!r}")
    if max_iterations <= LOG_SAMPLE_THRESHOLD:
        return list(range(1, max_iterations + 1))
    top = math.log(max_iterations)
    pts = {round(math.exp(top * i / (LOG_SAMPLE_POINTS - 1))) for i in range(LOG_SAMPLE_POINTS)}
    pts.add(max_iterations)
    return sorted(pts)


def advanced_gaussian_epsilon(sigma: float, l2_sensitivity: float, delta: float, iterations: int) -> float:
    """Advanced composition of ``iterations`` Gaussian queries at overall ``delta``."""
    per_query, slack = advanced_delta_split(delta, iterations)
    eps = gaussian_approx_epsilon(sigma, l2_sensitivity, per_query)
    return compose_advanced(eps, per_query, iterations, slack).epsilon


def sweep_cumulative_vs_iterations(sigma: float, l2_sensitivity: float, delta: float,
                                   max_iterations: int, cfg: Optional[AlphaSearchConfig] = None,
                                   conversion: str = "proof",
                                   per_iteration_alpha: bool = False) -> SweepTable:
    """Cumulative converted epsilon of ADP, RDP, zCDP and advanced composition.

    ADP and RDP use one alpha each, chosen for ``max_iterations``, unless
    ``per_iteration_alpha`` re-optimizes at every point (the chosen alphas are
    then written to extra columns).
    """
    cfg = cfg or AlphaSearchConfig()
    points = iteration_points(max_iterations)
    alpha_adp = find_alpha_min_epsilon(max_iterations, sigma, delta, l2_sensitivity, cfg, conversion).alpha_star
    alpha_rdp = find_alpha_min_epsilon_rdp(max_iterations, sigma, delta, l2_sensitivity, cfg).alpha_star
    rho = gaussian_zcdp_rho(sigma, l2_sensitivity)
    columns = ["iterations", "adp_epsilon", "rdp_epsilon", "zcdp_epsilon", "advanced_epsilon"]
    if per_iteration_alpha:
        columns += ["adp_alpha", "rdp_alpha"]
    rows = []
    for n in points:
        if per_iteration_alpha:
            a_res = find_alpha_min_epsilon(n, sigma, delta, l2_sensitivity, cfg, conversion)
            r_res = find_alpha_min_epsilon_rdp(n, sigma, delta, l2_sensitivity, cfg)
            row = [n, a_res.objective, r_res.objective]
        else:
            row = [n,
                   adp_cumulative_converted(alpha_adp, n, sigma, delta, l2_sensitivity, conversion),
                   rdp_cumulative_converted(alpha_rdp, n, sigma, delta, l2_sensitivity)]
        row.append(zcdp_to_approx(ZcdpGuarantee(n * rho), delta).epsilon)
        row.append(advanced_gaussian_epsilon(sigma, l2_sensitivity, delta, n))
        if per_iteration_alpha:
            row += [a_res.alpha_star, r_res.alpha_star]
        rows.append(tuple(row))
    meta = {
        "sigma": sigma, "l2_sensitivity": l2_sensitivity, "delta": delta,
        "max_iterations": max_iterations, "conversion": conversion,
        "alpha_grid": [cfg.alpha_min, cfg.alpha_max, cfg.alpha_step],
        "alpha_adp": None if per_iteration_alpha else alpha_adp,
        "alpha_rdp": None if per_iteration_alpha else alpha_rdp,
        "per_iteration_alpha": per_iteration_alpha,
        "sampled": max_iterations > LOG_SAMPLE_THRESHOLD,
        "iteration_points": points if max_iterations > LOG_SAMPLE_THRESHOLD else None,
        "frameworks": ["ADP", "RDP", "zCDP", "Advanced"],
    }
    return SweepTable(columns, rows, meta)


def _target_label(prefix, t):
    return f"{prefix}_{t:g}"


def sweep_optimizer_curves(iterations: int, delta: float, l2_sensitivity: float,
                           targets: Sequence[float], mode: str,
                           cfg: Optional[AlphaSearchConfig] = None,
                           conversion: str = "proof") -> SweepTable:
    """One column per target, indexed by alpha.

    ``epsilon_vs_alpha``: targets are sigmas, cells are converted cumulative
    epsilons. ``sigma_vs_alpha``: targets are epsilon bounds, cells are the
    smallest feasible grid sigma (None when nothing on the grid is feasible).
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    targets = [float(t) for t in targets]
    if not targets or any(not (t > 0.0 and math.isfinite(t)) for t in targets):
        raise DomainError("targets must be a nonempty list of positive numbers")
    _validate(iterations, delta, l2_sensitivity)
    cfg = cfg or AlphaSearchConfig()
    sigmas = cfg.sigma_grid()
    prefix = "sigma" if mode == "epsilon_vs_alpha" else "bound"
    columns = ["alpha", *(_target_label(prefix, t) for t in targets)]
    if len(set(columns)) != len(columns):
        raise DomainError("targets must be distinct")
    rows = []
    for alpha in cfg.alpha_grid():
        row = [alpha]
        for t in targets:
            if mode == "epsilon_vs_alpha":
                try:
                    row.append(adp_cumulative_converted(alpha, iterations, t, delta, l2_sensitivity, conversion))
                except AlphaDPError:
                    row.append(None)
            else:
                row.append(min_sigma_at_alpha(alpha, iterations, t, delta, l2_sensitivity, sigmas, conversion))
        rows.append(tuple(row))
    meta: dict[str, Any] = {
        "mode": mode, "iterations": iterations, "delta": delta,
        "l2_sensitivity": l2_sensitivity, "targets": targets, "conversion": conversion,
        "alpha_grid": [cfg.alpha_min, cfg.alpha_max, cfg.alpha_step],
    }
    if mode == "sigma_vs_alpha":
        meta["sigma_grid"] = [cfg.sigma_min, cfg.sigma_max, cfg.sigma_step]
    return SweepTable(columns, rows, meta)
