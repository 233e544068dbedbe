"""Command line interface.

Subcommands: ``static`` and ``dynamic`` run experiments and persist traces,
``oracle`` solves a sampled instance to high precision, ``ratefit`` fits a
log-log slope to (T, value) pairs. Experiment subcommands exit 0 only when the
run completed and every enabled bound check passed.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .divisions import ConvergenceError, regularity_constants
from .harness import (
    DEFAULT_T,
    ORACLE_TOL_1D,
    ORACLE_TOL_ND,
    ExperimentConfig,
    rate_fit,
    run_experiment,
    sampler_spec_for,
)
from .oracle import dual_bisection_1d, dual_descent_nd
from .scenario import ScenarioStream, sample_instance

_CONFIG_KEYS = (
    "algo",
    "model",
    "d",
    "m",
    "n",
    "c",
    "delta",
    "T",
    "seed",
    "eta",
    "with_oracle",
    "out",
)

_DEFAULTS = {
    "algo": "solo",
    "model": "power",
    "d": 1,
    "m": 15,
    "n": 25,
    "c": 10.0,
    "delta": 0.1,
    "T": None,
    "seed": 0,
    "eta": None,
    "with_oracle": False,
    "out": None,
}


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--algo", choices=("gd", "nesterov", "solo"), default=None)
    sub.add_argument("--model", choices=("power", "quadratic"), default=None)
    sub.add_argument("--d", type=int, default=None, help="number of commodities")
    sub.add_argument("--m", type=int, default=None, help="number of sales divisions")
    sub.add_argument("--n", type=int, default=None, help="number of production divisions")
    sub.add_argument("--c", type=float, default=None, help="box upper bound per commodity")
    sub.add_argument("--delta", type=float, default=None, help="curvature floor (quadratic model)")
    sub.add_argument("--T", type=int, default=None, help="number of rounds")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--eta", type=float, default=None, help="step size (default 1/kappa)")
    sub.add_argument("--with-oracle", dest="with_oracle", action="store_true", default=None)
    sub.add_argument("--out", type=str, default=None, help="trace CSV path (summary JSON written next to it)")
    sub.add_argument("--config", type=str, default=None, help="JSON file with the flags above; flags override it")


def _resolve_config(args: argparse.Namespace, mode: str) -> ExperimentConfig:
    merged = dict(_DEFAULTS)
    if args.config is not None:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")
        unknown = sorted(set(loaded) - set(_CONFIG_KEYS))
        if unknown:
            raise ValueError(f"{args.config}: unknown config keys {unknown}")
        merged.update(loaded)
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if merged["T"] is None:
        merged["T"] = DEFAULT_T[mode]
    if merged["with_oracle"] is None:
        merged["with_oracle"] = False
    return ExperimentConfig(mode=mode, **merged)


def _print_report(report) -> None:
    for check in report.bounds:
        if check.status == "skipped":
            print(f"SKIP {check.name}: {check.note}")
        else:
            word = "PASS" if check.status == "pass" else "FAIL"
            print(f"{word} {check.name}: lhs={check.lhs:.6g} rhs={check.rhs:.6g}")
    final = report.final
    print(f"final t={final['t']} F={final['F']:.6g} G={final['G']:.6g} |excess|={final['excess_norm']:.6g}")
    avg = report.average
    print(f"average price={avg['price']} residual={avg['residual']:.6g}")


def _cmd_run(args: argparse.Namespace, mode: str) -> int:
    cfg = _resolve_config(args, mode)
    output = run_experiment(cfg)
    _print_report(output.report)
    if output.trace_path is not None:
        print(f"trace written to {output.trace_path}")
        print(f"summary written to {output.summary_path}")
    return 0 if output.report.passed else 1


def _cmd_static(args: argparse.Namespace) -> int:
    return _cmd_run(args, "static")


def _cmd_dynamic(args: argparse.Namespace) -> int:
    return _cmd_run(args, "dynamic")


def _cmd_oracle(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args, "static")
    spec = sampler_spec_for(cfg)
    instance = sample_instance(ScenarioStream(spec))
    consts = regularity_constants(instance)
    if cfg.d == 1:
        sol = dual_bisection_1d(instance, ORACLE_TOL_1D)
    else:
        sol = dual_descent_nd(instance, ORACLE_TOL_ND)
    payload = {
        "lambda_star": [float(v) for v in sol.lambda_star],
        "F_star": sol.F_star,
        "G_star": sol.G_star,
        "residual": sol.residual,
        "at_boundary": sol.at_boundary,
        "constants": {
            "sigma": consts.sigma,
            "K": consts.K,
            "kappa": consts.kappa,
            "Kprime": consts.Kprime,
            "b_bound": consts.b_bound,
        },
    }
    text = json.dumps(payload, indent=2)
    print(text)
    if cfg.out is not None:
        path = Path(cfg.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
        print(f"oracle solution written to {path}", file=sys.stderr)
    return 0


def _cmd_ratefit(args: argparse.Namespace) -> int:
    rows = []
    with open(args.points) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{args.points}: line {lineno}: expected 'T,value'")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                if lineno == 1:
                    continue  # header line
                raise ValueError(f"{args.points}: line {lineno}: non-numeric pair {line!r}") from None
    slope = rate_fit(np.asarray(rows))
    print(f"{slope:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transferprices",
        description="Coordinate firm divisions through iteratively updated transfer prices.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_static = subs.add_parser("static", help="run an algorithm on one sampled instance")
    _add_run_flags(p_static)
    p_static.set_defaults(func=_cmd_static)

    p_dynamic = subs.add_parser("dynamic", help="run solo against a fresh instance each round")
    _add_run_flags(p_dynamic)
    p_dynamic.set_defaults(func=_cmd_dynamic)

    p_oracle = subs.add_parser("oracle", help="solve one sampled instance to high precision")
    _add_run_flags(p_oracle)
    p_oracle.set_defaults(func=_cmd_oracle)

    p_rate = subs.add_parser("ratefit", help="fit a log-log slope to a CSV of T,value pairs")
    p_rate.add_argument("points", help="CSV file of T,value rows (optional header)")
    p_rate.set_defaults(func=_cmd_ratefit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ConvergenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
