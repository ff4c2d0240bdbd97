import csv
import io
import json
import subprocess
import sys

import pytest

from alphadp.accounting import AdpGuarantee, RdpGuarantee, adp_to_approx, compose_adp, rdp_to_approx
from alphadp.cli import build_parser, main
from alphadp.mechanisms import RandomizedResponse, gaussian_adp_epsilon, rr_adp_epsilon
from alphadp.optimizer import find_alpha_min_epsilon
from alphadp.sweep import sweep_mechanism_vs_alpha

SUBCOMMANDS = ["mech-eval", "compose", "convert", "optimize-alpha", "optimize-sigma", "sweep"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


# -- exit codes ------------------------------------------------------------------------------

def test_success_and_json_record(capsys):
    code, out, _ = run(capsys, "mech-eval", "--mechanism", "gaussian", "--sigma", "100", "--alpha", "13")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["adp_epsilon"] == gaussian_adp_epsilon(100.0, 1.0, 13.0)
    assert doc["config"]["delta"] == 1e-5


@pytest.mark.parametrize("argv", [
    ["mech-eval", "--mechanism", "rr", "--p", "1.5", "--alpha", "2"],
    ["mech-eval", "--mechanism", "gaussian", "--sigma", "1"],
    ["convert", "--framework", "ADP", "--alpha", "2", "--epsilon", "0.5", "--delta", "0"],
    ["compose", "--framework", "ADP", "--alpha", "2", "--steps", ""],
    ["compose", "--framework", "ADP", "--alpha", "2", "--steps", "0.1", "--step-alphas", "3"],
    ["optimize-alpha", "--iterations", "0", "--sigma", "10"],
    ["sweep", "--preset", "fig1", "--alpha-min", "1"],
])
def test_validation_exit_code(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert json.loads(err)["exit_code"] == 2


def test_overflow_exit_code(capsys):
    code, _, err = run(capsys, "mech-eval", "--mechanism", "gaussian", "--sigma", "0.01", "--alpha", "200")
    assert code == 3
    assert json.loads(err)["type"] == "NumericOverflow"


def test_infeasible_exit_code(capsys):
    code, _, err = run(capsys, "optimize-sigma", "--iterations", "1000", "--epsilon-bound", "1e-12")
    assert code == 4
    assert json.loads(err)["type"] == "NoFeasibleSigma"


@pytest.mark.parametrize("argv", [["mech-eval", "--bogus", "1"], ["frobnicate"], [],
                                  ["sweep", "--format", "xml"]])
def test_usage_errors_are_rejected(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert json.loads(err)["error"] == "usage"


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help_exists(cmd):
    proc = subprocess.run([sys.executable, "-m", "alphadp.cli", cmd, "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "--delta" in proc.stdout and "--conversion" in proc.stdout


def test_every_subcommand_registered():
    parser = build_parser()
    choices = parser._subparsers._group_actions[0].choices
    assert sorted(choices) == sorted(SUBCOMMANDS)


# -- presets and schemas -------------------------------------------------------------------------

def test_fig4_preset_csv(capsys, tmp_path):
    out = tmp_path / "fig4.csv"
    code, stdout, _ = run(capsys, "sweep", "--preset", "fig4", "--delta", "1e-5", "--output", str(out))
    # a single table goes straight to --output
    assert code == 0 and stdout == ""
    text = out.read_text()
    assert len(text.splitlines()) == 101
    assert text.splitlines()[0] == "iterations,adp_epsilon,rdp_epsilon,zcdp_epsilon,advanced_epsilon"


def test_fig1_preset_csv(capsys, tmp_path):
    out = tmp_path / "fig1.csv"
    code, stdout, _ = run(capsys, "sweep", "--preset", "fig1", "--output", str(out))
    assert code == 0
    files = json.loads(stdout)["files"]
    assert [f.rsplit("_", 1)[1] for f in files] == ["p0.55.csv", "p0.75.csv", "p0.9.csv"]
    for f, p in zip(files, (0.55, 0.75, 0.9)):
        rows = parse_csv(open(f).read())
        assert list(rows[0]) == ["alpha", "adp_converted_epsilon", "baseline_epsilon"]
        # every cell recomputes from the library
        want = sweep_mechanism_vs_alpha(RandomizedResponse(p), [float(r["alpha"]) for r in rows], 1e-5)
        for r, w in zip(rows, want.rows):
            assert (float(r["alpha"]), float(r["adp_converted_epsilon"]), float(r["baseline_epsilon"])) == w


def test_rerun_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "sweep", "--preset", "fig6", "--output", str(a))
    run(capsys, "sweep", "--preset", "fig6", "--output", str(b))
    for suffix in ("sigma10", "sigma50", "sigma100"):
        fa = (tmp_path / f"a_{suffix}_delta1e-25.csv").read_bytes()
        fb = (tmp_path / f"b_{suffix}_delta1e-25.csv").read_bytes()
        assert fa == fb and b"\r" not in fa


def test_multi_table_stdout_blocks(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "fig2")
    assert code == 0
    assert [l for l in out.splitlines() if l.startswith("#")] == ["# b1", "# b2", "# b4"]


def test_explicit_sweep_kinds(capsys):
    code, out, _ = run(capsys, "sweep", "--kind", "mechanism", "--mechanism", "laplace", "--scale-b", "2",
                       "--alpha-max", "10")
    assert code == 0 and len(parse_csv(out)) == 9
    code, out, _ = run(capsys, "sweep", "--kind", "optimizer", "--mode", "epsilon_vs_alpha",
                       "--iterations", "100", "--targets", "10,50", "--alpha-max", "20", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == ["alpha", "sigma_10", "sigma_50"]
    assert doc["metadata"]["config"]["alpha_max"] == 20.0


# -- config precedence and round trips ---------------------------------------------------------------

def test_config_file_and_flag_precedence(capsys, tmp_path):
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"framework": "RDP", "alpha": 11, "epsilon": 1.0, "delta": 1e-3}))
    code, out, _ = run(capsys, "convert", "--config", str(conf))
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["epsilon"] == rdp_to_approx(RdpGuarantee(11, 1.0), 1e-3).epsilon
    code, out, _ = run(capsys, "convert", "--config", str(conf), "--delta", "1e-5")
    doc = json.loads(out)
    assert doc["config"]["delta"] == 1e-5
    assert doc["result"]["epsilon"] == rdp_to_approx(RdpGuarantee(11, 1.0), 1e-5).epsilon


def test_unknown_config_key_rejected(capsys, tmp_path):
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"framework": "RDP", "colour": "red"}))
    code, _, err = run(capsys, "convert", "--config", str(conf))
    assert code == 2 and "colour" in json.loads(err)["message"]


def test_compose_csv_round_trip(capsys):
    code, out, _ = run(capsys, "compose", "--framework", "ADP", "--alpha", "2", "--steps", "0.1,0.1",
                       "--format", "csv")
    assert code == 0
    (row,) = parse_csv(out)
    assert float(row["cumulative"]) == compose_adp(0.1, 0.1, 2)
    assert [float(x) for x in row["steps"].split(";")] == [0.1, 0.1]
    assert float(row["converted_epsilon"]) == adp_to_approx(AdpGuarantee(2, compose_adp(0.1, 0.1, 2)),
                                                            1e-5).epsilon


def test_optimize_alpha_round_trip(capsys):
    code, out, _ = run(capsys, "optimize-alpha", "--iterations", "1000", "--sigma", "100", "--format", "csv")
    assert code == 0
    (row,) = parse_csv(out)
    res = find_alpha_min_epsilon(1000, 100.0, 1e-5, 1.0)
    assert float(row["alpha_star"]) == res.alpha_star
    assert float(row["objective"]) == res.objective
    assert row["feasible"] == "true"


def test_mech_eval_rr(capsys):
    code, out, _ = run(capsys, "mech-eval", "--mechanism", "rr", "--p", "0.9", "--alpha", "2")
    assert code == 0
    assert json.loads(out)["result"]["adp_epsilon"] == rr_adp_epsilon(0.9, 2.0)


def test_output_file_json(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "convert", "--framework", "zCDP", "--rho", "0.05", "--output", str(out))
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["result"]["delta"] == 1e-5


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "alphadp.cli", "convert", "--framework", "ADP",
                           "--alpha", "2", "--epsilon", "0.5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["epsilon"] == adp_to_approx(AdpGuarantee(2, 0.5), 1e-5).epsilon
