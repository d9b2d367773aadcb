"""Command-line entry point.

Exit codes: 0 success, 1 failed verification checks, 2 configuration error,
3 numeric failure (for example a state that does not fit its grid).
"""

import argparse
import sys

from .config import load_config
from .exceptions import (BoundaryWarning, ConfigError, MassLossWarning, NegativeDensityError,
                         PurityError)

EXIT_OK, EXIT_CHECKS, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

_NUMERIC_ERRORS = (ArithmeticError, BoundaryWarning, MassLossWarning, NegativeDensityError,
                   PurityError)


def _cmd_run(args):
    from .scenarios import run_scenario, write_outputs

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = args.out if args.out is not None else cfg.out_dir
    try:
        result = run_scenario(cfg)
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        write_outputs(result, out_dir)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(result.summary.to_text(), end="")
    if not result.summary.passed:
        worst = max(result.summary.bounds, key=lambda b: b.max_margin)
        print(f"dominance violated: {worst.bound} margin {worst.max_margin:.6g} "
              f"at t = {worst.t_at_max:.6g}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_verify_all(args):
    from .checks import run_checks

    results = run_checks(grid_n=args.grid_n, stream=sys.stdout)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print("failing: " + ", ".join(r.name for r in failed), file=sys.stderr)
        return EXIT_CHECKS
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phasespeed",
        description="Phase-space speed limits for quenched harmonic oscillators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a configured scenario and write series.csv")
    run.add_argument("config", help="scenario configuration file")
    run.add_argument("--out", default=None, help="output directory (overrides [output] dir)")
    run.set_defaults(func=_cmd_run)
    ver = sub.add_parser("verify-all", help="cross-check the numerics against closed forms")
    ver.add_argument("--grid-n", type=int, default=512, help="grid points per axis (default 512)")
    ver.set_defaults(func=_cmd_verify_all)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "verify-all" and args.grid_n < 16:
        print("--grid-n must be at least 16", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
