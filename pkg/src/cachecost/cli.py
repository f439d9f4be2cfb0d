"""Command-line front end.

Four subcommands, all driven by a config file and writing CSV:

  run        simulate the configured policy, one row per seed plus a mean
  sweep      repeat the run over a parameter grid and report the argmin
  analytic   closed-form per-request costs, no simulation
  validate   simulate and compare with the closed-form counterpart

Exit codes: 0 success, 2 configuration problems, 3 malformed trace files,
4 a policy/engine invariant violation.
"""

from __future__ import annotations

import argparse
import sys

from .engine import InvariantViolation
from .experiments import (
    ANALYTIC_COLUMNS,
    VALIDATION_COLUMNS,
    ConfigError,
    analytic_table,
    emit_csv,
    emit_dict_csv,
    load_config,
    run_experiment,
    sweep,
    validation_report,
)
from .workload import TraceFormatError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRACE = 3
EXIT_INVARIANT = 4


def _parse_grid(text: str, *, integers: bool = False) -> list:
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            values.append(int(part) if integers else float(part))
        except ValueError:
            raise ConfigError(f"bad grid value {part!r}") from None
    if not values:
        raise ConfigError(f"empty grid {text!r}")
    return values


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", required=True, help="experiment config file (INI)")
    sub.add_argument("--out", default=None, help="output CSV path (default: stdout)")


def _add_run_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--seed",
        type=int,
        action="append",
        default=None,
        metavar="N",
        help="override config seeds; repeat the flag for several",
    )
    sub.add_argument("--jobs", type=int, default=1, help="parallel worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cachecost",
        description="Cost simulation and analysis for pay-per-use caching policies.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_run = subs.add_parser("run", help="simulate the configured policy")
    _add_common(p_run)
    _add_run_args(p_run)

    p_sweep = subs.add_parser("sweep", help="sweep one parameter over a grid")
    _add_common(p_sweep)
    _add_run_args(p_sweep)
    grids = p_sweep.add_mutually_exclusive_group(required=True)
    grids.add_argument("--ttl-grid", metavar="LIST", help="comma-separated cache lifetimes, hours")
    grids.add_argument("--window-grid", metavar="LIST", help="comma-separated estimator windows, hours")
    grids.add_argument("--capacity-grid", metavar="LIST", help="comma-separated LRU capacities")
    grids.add_argument("--lambda-grid", metavar="LIST", help="comma-separated request rates, per hour")

    p_analytic = subs.add_parser("analytic", help="closed-form costs, no simulation")
    _add_common(p_analytic)
    p_analytic.add_argument("--ttl-grid", metavar="LIST", help="shared-TTL grid to tabulate and argmin")
    p_analytic.add_argument("--lambda-grid", metavar="LIST", help="repeat the argmin search per rate")

    p_validate = subs.add_parser("validate", help="simulation vs closed form")
    _add_common(p_validate)
    _add_run_args(p_validate)

    return parser


def _with_seed_override(cfg, seeds):
    if not seeds:
        return cfg
    if any(s < 0 for s in seeds):
        raise ConfigError("--seed values must be >= 0")
    from dataclasses import replace

    return replace(cfg, seeds=tuple(seeds))


def _emit(rows, out, writer) -> None:
    if out is None:
        writer(rows, sys.stdout)
    else:
        writer(rows, out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "run":
            cfg = _with_seed_override(cfg, args.seed)
            rows = run_experiment(cfg, jobs=args.jobs)
            _emit(rows, args.out, emit_csv)
        elif args.command == "sweep":
            cfg = _with_seed_override(cfg, args.seed)
            if args.ttl_grid is not None:
                axis, grid = "ttl", _parse_grid(args.ttl_grid)
            elif args.window_grid is not None:
                axis, grid = "window", _parse_grid(args.window_grid)
            elif args.capacity_grid is not None:
                axis, grid = "capacity", _parse_grid(args.capacity_grid, integers=True)
            else:
                axis, grid = "lambda", _parse_grid(args.lambda_grid)
            rows = sweep(cfg, axis, grid, jobs=args.jobs)
            _emit(rows, args.out, emit_csv)
        elif args.command == "analytic":
            ttl_grid = _parse_grid(args.ttl_grid) if args.ttl_grid is not None else None
            lambda_grid = _parse_grid(args.lambda_grid) if args.lambda_grid is not None else None
            rows = analytic_table(cfg, ttl_grid=ttl_grid, lambda_grid=lambda_grid)
            _emit(rows, args.out, lambda r, d: emit_dict_csv(r, ANALYTIC_COLUMNS, d))
        else:
            cfg = _with_seed_override(cfg, args.seed)
            rows = validation_report(cfg, jobs=args.jobs)
            _emit(rows, args.out, lambda r, d: emit_dict_csv(r, VALIDATION_COLUMNS, d))
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except TraceFormatError as err:
        print(f"trace error: {err}", file=sys.stderr)
        return EXIT_TRACE
    except InvariantViolation as err:
        print(f"invariant violation: {err}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
