"""Command-line front end: estimation, gain selection, simulation, verification.

Exit codes follow a stable contract: 0 success, 1 validation failure,
2 input/parse error.  Output files are written to a temporary name and
renamed into place, so a failing run never leaves partial output, and
reruns with identical inputs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import closed_form
from .estimate import CaseSeriesError, estimate_all, load_series
from .model import ModelParams
from .policy import admissible_gain_range, feasibility_almost_sure, feasibility_average
from .simulate import (
    Scenario,
    check_oracle_equivalence,
    run_ensemble,
    validate_ensemble,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2

_CSV_HEADER = "day,compartment,mean,stderr,min,p05,p95,max,closed_form"
_CSV_ORDER = ("S", "I", "R", "D", "B")


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def cmd_estimate(args: argparse.Namespace) -> int:
    """Estimate (d_i, delta) from a historical series; JSON on stdout."""
    series = load_series(
        args.data,
        deaths_daily=args.deaths_daily,
        accumulate_confirmed=(args.pipeline == "mean"),
        active_window=args.active_window,
    )
    result = estimate_all(series, args.v_mean)
    payload = {"pipeline": args.pipeline, "v_mean": args.v_mean}
    payload.update(result.to_dict())
    _emit_json(payload)
    return EXIT_OK


def _params_from_args(args: argparse.Namespace) -> ModelParams:
    # Mean fields may be omitted when only the bound-based (almost-sure)
    # analysis is wanted; they then default to values consistent with the
    # bounds.  Average-mode users should pass all three means explicitly.
    delta_mean = args.delta_mean if args.delta_mean is not None else args.delta_max
    d_mean = args.d_mean if args.d_mean is not None else args.d_max
    v_mean = args.v_mean if args.v_mean is not None else 0.5 * (args.v_min + args.v_max)
    return ModelParams(
        s0=args.s0,
        i0=args.i0,
        delta_max=args.delta_max,
        d_max=args.d_max,
        v_min=args.v_min,
        v_max=args.v_max,
        delta_mean=delta_mean,
        d_mean=d_mean,
        v_mean=v_mean,
    )


def cmd_select_gain(args: argparse.Namespace) -> int:
    """Feasible-gain analysis and sub-optimal gain selection; JSON on stdout."""
    params = _params_from_args(args)
    if args.mode == "almost-sure":
        feasibility = feasibility_almost_sure(params, args.cap)
    else:
        feasibility = feasibility_average(params, args.cap)
    _emit_json(feasibility.to_dict())
    return EXIT_OK


def _load_scenario(args: argparse.Namespace) -> tuple[Scenario, Path]:
    config_path = Path(args.config)
    with config_path.open() as handle:
        data = json.load(handle)
    scenario = Scenario.from_dict(data)
    if getattr(args, "seed", None) is not None:
        scenario = dataclasses.replace(scenario, master_seed=args.seed)
    out_dir = Path(args.out_dir) if getattr(args, "out_dir", None) else Path(
        data.get("out_dir", ".")
    )
    return scenario, out_dir


def _closed_form_overlay(scenario: Scenario) -> dict[str, np.ndarray | None]:
    """Expectation curves for the CSV overlay; None where no formula applies."""
    params, gain, h = scenario.params, scenario.policy.gain, scenario.horizon
    overlay: dict[str, np.ndarray | None] = dict.fromkeys(_CSV_ORDER, None)
    lo, hi = admissible_gain_range(params)
    if not lo <= gain <= hi:
        return overlay
    infected = closed_form.expected_infected_linear(params, gain, h).values
    overlay["I"] = infected
    try:
        deceased = closed_form.expected_deceased_linear(params, gain, h).values
        overlay["D"] = deceased
    except closed_form.OutOfBranchError:
        deceased = None
    try:
        susceptible = closed_form.expected_susceptible_linear(params, gain, h).values
        overlay["S"] = susceptible
    except (closed_form.WindowExceededError, closed_form.OutOfBranchError):
        susceptible = None
    if susceptible is not None and deceased is not None:
        # Expectation of R follows from conservation of the expected total.
        overlay["R"] = params.total0 - susceptible - infected - deceased
    return overlay


def _summary_csv(scenario: Scenario, summary) -> str:
    overlay = _closed_form_overlay(scenario)
    lines = [_CSV_HEADER]
    for name in _CSV_ORDER:
        stats = summary.stats[name.lower()]
        curve = overlay[name]
        for day in range(scenario.horizon + 1):
            closed = "" if curve is None else repr(float(curve[day]))
            lines.append(
                f"{day},{name},{float(stats.mean[day])!r},{float(stats.stderr[day])!r},"
                f"{float(stats.minimum[day])!r},{float(stats.p05[day])!r},"
                f"{float(stats.p95[day])!r},{float(stats.maximum[day])!r},{closed}"
            )
    return "\n".join(lines) + "\n"


def cmd_simulate(args: argparse.Namespace) -> int:
    """Run the configured ensemble; write summary.csv and report.json."""
    scenario, out_dir = _load_scenario(args)
    summary = run_ensemble(scenario)
    report = validate_ensemble(summary, scenario.params, scenario.policy.gain)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out_dir / "summary.csv", _summary_csv(scenario, summary))
    payload = report.to_dict()
    payload["violations"] = summary.violations.to_dict()
    _write_atomic(out_dir / "report.json", json.dumps(payload, indent=2) + "\n")
    print(f"wrote {out_dir / 'summary.csv'} and {out_dir / 'report.json'}")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the invariant suite on the configured scenario; JSON verdict on stdout."""
    scenario, _ = _load_scenario(args)
    checks = [check_oracle_equivalence(scenario)]
    summary = run_ensemble(scenario)
    report = validate_ensemble(summary, scenario.params, scenario.policy.gain)
    checks.extend(report.checks)
    passed = all(c.passed is not False for c in checks)
    payload = {
        "passed": passed,
        "failures": [c.to_dict() for c in checks if c.passed is False],
        "checks": [c.to_dict() for c in checks],
        "violations": summary.violations.to_dict(),
    }
    _emit_json(payload)
    return EXIT_OK if passed else EXIT_VALIDATION


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sirdctl",
        description="Stochastic SIRD epidemic control toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate rates from a historical CSV")
    est.add_argument("--data", required=True, help="path to the date,confirmed,deaths CSV")
    est.add_argument("--v-mean", type=float, required=True,
                     help="mean effectiveness rate of control")
    est.add_argument("--pipeline", choices=("almost-sure", "mean"), default="almost-sure",
                     help="almost-sure: confirmed column as-is (bound estimates); "
                          "mean: accumulate confirmed into running totals (mean estimates)")
    est.add_argument("--deaths-daily", action="store_true",
                     help="deaths column holds daily counts; accumulate before estimating")
    est.add_argument("--active-window", type=int, default=None,
                     help="build a trailing-window active-case proxy of this many days")
    est.set_defaults(func=cmd_estimate)

    sel = sub.add_parser("select-gain", help="feasible gain interval and selected gain")
    sel.add_argument("--mode", choices=("almost-sure", "average"), required=True)
    sel.add_argument("--cap", type=float, default=1.0, help="resource cap L >= 1")
    sel.add_argument("--delta-max", type=float, required=True)
    sel.add_argument("--d-max", type=float, required=True)
    sel.add_argument("--v-min", type=float, required=True)
    sel.add_argument("--v-max", type=float, required=True)
    sel.add_argument("--delta-mean", type=float, default=None)
    sel.add_argument("--d-mean", type=float, default=None)
    sel.add_argument("--v-mean", type=float, default=None)
    sel.add_argument("--s0", type=float, default=1e6)
    sel.add_argument("--i0", type=float, default=100.0)
    sel.set_defaults(func=cmd_select_gain)

    sim = sub.add_parser("simulate", help="run an ensemble from a scenario config")
    sim.add_argument("--config", required=True, help="path to the scenario JSON config")
    sim.add_argument("--out-dir", default=None, help="output directory (default: config value or .)")
    sim.add_argument("--seed", type=int, default=None, help="override the config master seed")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run the invariant suite on a scenario config")
    ver.add_argument("--config", required=True, help="path to the scenario JSON config")
    ver.add_argument("--seed", type=int, default=None, help="override the config master seed")
    ver.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CaseSeriesError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
