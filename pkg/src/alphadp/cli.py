"""``alphadp`` command-line interface.

Exit codes: 0 success, 2 validation error, 3 numeric overflow, 4 infeasible
search. Errors are written to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .accounting import (
    AdpGuarantee,
    CompositionLedger,
    RdpGuarantee,
    ZcdpGuarantee,
    adp_to_approx,
    advanced_delta_split,
    rdp_to_approx,
    zcdp_to_approx,
)
from .errors import (
    DomainError,
    NoFeasibleAlpha,
    NoFeasibleSigma,
    NumericOverflow,
    QuadratureDivergence,
)
from .mechanisms import (
    GaussianMech,
    LaplaceMech,
    RandomizedResponse,
    adp_epsilon,
    gaussian_approx_epsilon,
    gaussian_rdp_epsilon,
    gaussian_zcdp_rho,
    laplace_pure_epsilon,
    rr_pure_epsilon,
)
from .optimizer import (
    AlphaSearchConfig,
    find_alpha_min_epsilon,
    find_alpha_min_epsilon_rdp,
    find_alpha_min_sigma,
)
from .presets import PRESETS, run_preset
from .sweep import (
    MODES,
    SweepTable,
    _fmt,
    sweep_cumulative_vs_iterations,
    sweep_mechanism_vs_alpha,
    sweep_optimizer_curves,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_OVERFLOW = 3
EXIT_INFEASIBLE = 4

DEFAULTS = {
    "delta": 1e-5,
    "sensitivity": 1.0,
    "alpha_min": 2.0,
    "alpha_max": 300.0,
    "alpha_step": 1.0,
    "sigma_min": 1.0,
    "sigma_max": 500.0,
    "sigma_step": 1.0,
    "conversion": "proof",
    "format": "json",
    "output": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _shared(p, fmt_default="json"):
    # defaults are None so config-file values survive unless a flag is given
    p.add_argument("--config", help="JSON file with option values; flags take precedence")
    p.add_argument("--output", help="write the result here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), help=f"output format (default {fmt_default})")
    p.add_argument("--delta", type=float, help="failure probability (default 1e-5)")
    p.add_argument("--sensitivity", type=float, help="query sensitivity (default 1)")
    p.add_argument("--alpha-min", type=float)
    p.add_argument("--alpha-max", type=float)
    p.add_argument("--alpha-step", type=float)
    p.add_argument("--conversion", choices=("proof", "statement"),
                   help="ADP to (eps, delta) conversion form (default proof)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alphadp", description="Alpha differential privacy accounting.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mech-eval", help="per-query cost of one mechanism at one alpha")
    _shared(p)
    p.add_argument("--mechanism", choices=("rr", "laplace", "gaussian"))
    p.add_argument("--p", type=float, help="randomized response truth probability")
    p.add_argument("--scale-b", type=float, help="Laplace scale")
    p.add_argument("--sigma", type=float, help="Gaussian standard deviation")
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("compose", help="compose per-step guarantees into a ledger")
    _shared(p)
    p.add_argument("--framework", choices=("ADP", "RDP", "zCDP", "Advanced"))
    p.add_argument("--steps", type=_float_list, help="comma-separated per-step epsilons (rhos for zCDP)")
    p.add_argument("--alpha", type=float, help="ledger alpha (ADP, RDP)")
    p.add_argument("--step-alphas", type=_float_list, help="per-step alphas; must all equal --alpha")

    p = sub.add_parser("convert", help="convert a guarantee to (eps, delta)-DP")
    _shared(p)
    p.add_argument("--framework", choices=("ADP", "RDP", "zCDP"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--epsilon", type=float, help="ADP epsilon or RDP epsilon-bar")
    p.add_argument("--rho", type=float)

    p = sub.add_parser("optimize-alpha", help="alpha minimising cumulative epsilon (Gaussian)")
    _shared(p)
    p.add_argument("--iterations", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--framework", choices=("ADP", "RDP"), help="default ADP")

    p = sub.add_parser("optimize-sigma", help="smallest sigma meeting an epsilon bound (Gaussian)")
    _shared(p)
    p.add_argument("--iterations", type=int)
    p.add_argument("--epsilon-bound", type=float)
    p.add_argument("--sigma-min", type=float)
    p.add_argument("--sigma-max", type=float)
    p.add_argument("--sigma-step", type=float)

    p = sub.add_parser("sweep", help="tabulate a figure preset or an explicit sweep")
    _shared(p, "csv")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--kind", choices=("mechanism", "cumulative", "optimizer"))
    p.add_argument("--mechanism", choices=("rr", "laplace", "gaussian"))
    p.add_argument("--p", type=float)
    p.add_argument("--scale-b", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--targets", type=_float_list, help="sigmas or epsilon bounds, comma-separated")
    p.add_argument("--sigma-min", type=float)
    p.add_argument("--sigma-max", type=float)
    p.add_argument("--sigma-step", type=float)
    p.add_argument("--per-iteration-alpha", action="store_true", default=None,
                   help="re-optimize alpha at every iteration count")
    return parser


def _effective(args, parser_dests):
    """Defaults < config file < flags. Unknown config keys are rejected.

    Returns the merged options and the set of keys the user supplied.
    """
    cfg = dict(DEFAULTS)
    if args.command == "sweep":
        cfg["format"] = "csv"
    explicit = set()
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise DomainError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(loaded, dict):
            raise DomainError("config file must hold a JSON object")
        for key, value in loaded.items():
            norm = key.replace("-", "_")
            if norm not in parser_dests or norm == "config":
                raise DomainError(f"unknown config key {key!r} for {args.command}")
            cfg[norm] = value
            explicit.add(norm)
    for key in parser_dests:
        value = getattr(args, key, None)
        if value is not None and key != "config":
            cfg[key] = value
            explicit.add(key)
    return {k: v for k, v in sorted(cfg.items()) if k in parser_dests}, explicit


def _require(cfg, *keys):
    for key in keys:
        if cfg.get(key) is None:
            raise DomainError(f"missing required option --{key.replace('_', '-')}")
    return [cfg[k] for k in keys]


def _search_config(cfg):
    names = ("alpha_min", "alpha_max", "alpha_step", "sigma_min", "sigma_max", "sigma_step")
    return AlphaSearchConfig(**{k: cfg.get(k, DEFAULTS[k]) for k in names})


def _mechanism(cfg):
    (kind,) = _require(cfg, "mechanism")
    sens = cfg["sensitivity"]
    if kind == "rr":
        return RandomizedResponse(*_require(cfg, "p"))
    if kind == "laplace":
        return LaplaceMech(*_require(cfg, "scale_b"), sens)
    return GaussianMech(*_require(cfg, "sigma"), sens)


# -- commands ---------------------------------------------------------------------

def cmd_mech_eval(cfg):
    mech = _mechanism(cfg)
    alpha, delta = _require(cfg, "alpha", "delta")
    eps = adp_epsilon(mech, alpha)
    record = {
        "alpha": float(alpha),
        "delta": delta,
        "adp_epsilon": eps,
        "adp_converted_epsilon": adp_to_approx(AdpGuarantee(alpha, eps), delta, cfg["conversion"]).epsilon,
    }
    if isinstance(mech, GaussianMech):
        rdp = gaussian_rdp_epsilon(mech.sigma, mech.l2_sensitivity, alpha)
        rho = gaussian_zcdp_rho(mech.sigma, mech.l2_sensitivity)
        record.update({
            "rdp_epsilon": rdp,
            "rdp_converted_epsilon": rdp_to_approx(RdpGuarantee(alpha, rdp), delta).epsilon,
            "zcdp_rho": rho,
            "zcdp_converted_epsilon": zcdp_to_approx(ZcdpGuarantee(rho), delta).epsilon,
            "approx_dp_epsilon": gaussian_approx_epsilon(mech.sigma, mech.l2_sensitivity, delta),
        })
    elif isinstance(mech, LaplaceMech):
        record["pure_dp_epsilon"] = laplace_pure_epsilon(mech.scale_b, mech.l1_sensitivity)
    else:
        record["pure_dp_epsilon"] = rr_pure_epsilon(mech.p)
    return record


def cmd_compose(cfg):
    framework, steps = _require(cfg, "framework", "steps")
    if not steps:
        raise DomainError("steps must not be empty")
    alpha = cfg.get("alpha")
    step_alphas = cfg.get("step_alphas")
    if step_alphas is not None:
        if len(step_alphas) != len(steps):
            raise DomainError("step_alphas must have one entry per step")
        if alpha is None:
            alpha = step_alphas[0]
    if framework == "Advanced":
        per_query, slack = advanced_delta_split(cfg["delta"], len(steps))
        ledger = CompositionLedger.empty(framework, delta_per_query=per_query, delta_slack=slack)
    elif framework in ("ADP", "RDP"):
        if alpha is None:
            raise DomainError(f"missing required option --alpha for {framework}")
        ledger = CompositionLedger.empty(framework, alpha)
    else:
        ledger = CompositionLedger.empty(framework)
    for i, step in enumerate(steps):
        ledger = ledger.append(step, None if step_alphas is None else step_alphas[i])
    record = ledger.to_dict()
    record["converted"] = _approx(ledger.to_approx(cfg["delta"], cfg["conversion"]))
    return record


def _approx(g):
    return {"epsilon": g.epsilon, "delta": g.delta}


def cmd_convert(cfg):
    framework, delta = _require(cfg, "framework", "delta")
    if framework == "ADP":
        alpha, eps = _require(cfg, "alpha", "epsilon")
        return _approx(adp_to_approx(AdpGuarantee(alpha, eps), delta, cfg["conversion"]))
    if framework == "RDP":
        alpha, eps = _require(cfg, "alpha", "epsilon")
        return _approx(rdp_to_approx(RdpGuarantee(alpha, eps), delta))
    (rho,) = _require(cfg, "rho")
    return _approx(zcdp_to_approx(ZcdpGuarantee(rho), delta))


def cmd_optimize_alpha(cfg):
    iterations, sigma, delta = _require(cfg, "iterations", "sigma", "delta")
    search = _search_config(cfg)
    if cfg.get("framework", "ADP") == "RDP":
        result = find_alpha_min_epsilon_rdp(iterations, sigma, delta, cfg["sensitivity"], search)
    else:
        result = find_alpha_min_epsilon(iterations, sigma, delta, cfg["sensitivity"], search, cfg["conversion"])
    return result.to_dict()


def cmd_optimize_sigma(cfg):
    iterations, bound, delta = _require(cfg, "iterations", "epsilon_bound", "delta")
    result = find_alpha_min_sigma(iterations, bound, delta, cfg["sensitivity"], _search_config(cfg),
                                  cfg["conversion"])
    record = result.to_dict()
    record["sigma_min"] = record["objective"]
    return record


def cmd_sweep(cfg, explicit=frozenset()):
    """Returns a list of ``(label, SweepTable)``.

    A preset keeps its own delta and sensitivity unless they were supplied.
    """
    search = _search_config(cfg)
    conversion = cfg["conversion"]
    per_iter = bool(cfg.get("per_iteration_alpha"))
    if cfg.get("preset"):
        delta = cfg["delta"] if "delta" in explicit else None
        sens = cfg["sensitivity"] if "sensitivity" in explicit else None
        return run_preset(cfg["preset"], search, delta, sens, conversion, per_iter)
    (kind,) = _require(cfg, "kind")
    delta, sens = cfg["delta"], cfg["sensitivity"]
    if kind == "mechanism":
        table = sweep_mechanism_vs_alpha(_mechanism(cfg), search.alpha_grid(), delta, conversion)
    elif kind == "cumulative":
        sigma, n = _require(cfg, "sigma", "max_iterations")
        table = sweep_cumulative_vs_iterations(sigma, sens, delta, n, search, conversion, per_iter)
    else:
        n, targets, mode = _require(cfg, "iterations", "targets", "mode")
        table = sweep_optimizer_curves(n, delta, sens, targets, mode, search, conversion)
    return [("", table)]


COMMANDS = {
    "mech-eval": cmd_mech_eval,
    "compose": cmd_compose,
    "convert": cmd_convert,
    "optimize-alpha": cmd_optimize_alpha,
    "optimize-sigma": cmd_optimize_sigma,
    "sweep": cmd_sweep,
}


# -- output -----------------------------------------------------------------------

def _record_csv(record):
    flat = {k: v for k, v in record.items() if not isinstance(v, (dict, list))}
    for k, v in record.items():
        if isinstance(v, dict):
            flat.update({f"{k}_{kk}": vv for kk, vv in v.items()})
        elif isinstance(v, list):
            flat[k] = ";".join(_fmt(x) for x in v)
    cells = [v if isinstance(v, str) else ("" if v is None else _fmt(v)) for v in flat.values()]
    return ",".join(flat) + "\n" + ",".join(cells) + "\n"


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _render_table(table: SweepTable, fmt, effective):
    if fmt == "csv":
        return table.to_csv()
    data = table.to_dict()
    data["metadata"] = {**data["metadata"], "config": effective}
    return _json(data)


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def _emit(command, result, cfg):
    fmt, out = cfg["format"], cfg.get("output")
    if command != "sweep":
        if fmt == "csv":
            _write(out, _record_csv(result))
        else:
            _write(out, _json({"result": result, "config": cfg}))
        return
    if len(result) == 1:
        _write(out, _render_table(result[0][1], fmt, cfg))
        return
    # several curves: one file per curve next to --output, or labelled blocks on stdout
    if out is None:
        blocks = [f"# {label}\n" + _render_table(t, fmt, cfg) for label, t in result]
        sys.stdout.write("\n".join(blocks))
        return
    base = Path(out)
    written = []
    for label, table in result:
        path = base.with_name(f"{base.stem}_{label}{base.suffix}")
        path.write_text(_render_table(table, fmt, cfg), newline="\n")
        written.append(str(path))
    sys.stdout.write(_json({"files": written}))


def _fail(code, kind, exc):
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc),
                                 "exit_code": code}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_VALIDATION, "usage", exc)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    dests = {a.dest for a in sub._actions if a.dest != "help"}
    try:
        cfg, explicit = _effective(args, dests)
        if args.command == "sweep":
            result = cmd_sweep(cfg, explicit)
        else:
            result = COMMANDS[args.command](cfg)
        _emit(args.command, result, cfg)
    except (NoFeasibleAlpha, NoFeasibleSigma) as exc:
        return _fail(EXIT_INFEASIBLE, "infeasible", exc)
    except (NumericOverflow, QuadratureDivergence) as exc:
        return _fail(EXIT_OVERFLOW, "overflow", exc)
    except (DomainError, TypeError, ValueError) as exc:
        return _fail(EXIT_VALIDATION, "validation", exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
