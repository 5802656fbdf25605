"""Command-line entry point ``vplab <command> [flags]``.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import ExperimentSpec, ValidationError, load_config, run_experiment

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--out", default="runs", help="output directory (default: runs)")
    p.add_argument("--name", help="run name (default: the command name)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quiet", action="store_true")


def _visc_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha")
    p.add_argument("--d")
    p.add_argument("--t-start")
    p.add_argument("--grid", metavar="N,L", help="grid points per side and box half-width")
    p.add_argument("--omega", help="frame rotation rate, or 'auto' for alpha/(pi d^2)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vplab", description="Vortex pair laboratory.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pv", help="point-vortex trajectory")
    p.add_argument("vortices", nargs="?", help="file of 'alpha x y' lines")
    p.add_argument("--t-end")
    p.add_argument("--tol")
    p.add_argument("--samples", help="uniform output samples (0: every accepted step)")
    _common(p)

    p = sub.add_parser("steady", help="steady pair expansion, residuals and rescaled field")
    p.add_argument("--profile")
    p.add_argument("--d", help="comma-separated separations for the residual table")
    p.add_argument("--alpha")
    p.add_argument("--epsilon", help="core size of the rescaled pair")
    p.add_argument("--pair-d", help="separation of the rescaled pair")
    p.add_argument("--grid", metavar="N,L")
    _common(p)

    p = sub.add_parser("fnu", help="viscous mode-2 correction sweep")
    p.add_argument("--nu-over-alpha", help="comma-separated ratios")
    p.add_argument("--alpha")
    _common(p)

    p = sub.add_parser("visc", help="viscous pair run with error metrics")
    p.add_argument("--nu")
    p.add_argument("--t-end")
    p.add_argument("--snap-every", help="snapshot interval in time units")
    p.add_argument("--snapshots", help="explicit comma-separated snapshot times")
    p.add_argument("--dump", help="1 to write binary snapshots (default), 0 to skip")
    _visc_flags(p)
    _common(p)

    p = sub.add_parser("scaling", help="power-law scaling experiments")
    p.add_argument("kind", nargs="?", choices=("residual", "thm1", "app3", "fnu"))
    p.add_argument("--d", help="separations (residual) or pair separation (thm1, app3)")
    p.add_argument("--profile")
    p.add_argument("--orders", help="correction orders to keep, e.g. 2,3,4 or 'leading'")
    p.add_argument("--nu-over-alpha")
    p.add_argument("--tau-range", metavar="LO,HI", help="range of nu t/d^2")
    p.add_argument("--samples")
    p.add_argument("--alpha")
    p.add_argument("--t-start")
    p.add_argument("--grid", metavar="N,L")
    p.add_argument("--omega")
    _common(p)

    p = sub.add_parser("accept", help="evaluate acceptance criteria")
    p.add_argument("criteria", nargs="*", type=int, help="criterion numbers (default: all fast ones)")
    p.add_argument("--all", action="store_true", help="include the long viscous runs")
    return ap


_META = {"command", "config", "out", "name", "seed", "quiet", "criteria", "all"}


def _params(args: argparse.Namespace) -> dict:
    params = load_config(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key in _META or value is None:
            continue
        params[key] = value
    return params


def _accept(args) -> int:
    from .acceptance import CRITERIA, SLOW, evaluate

    wanted = args.criteria or [c for c in CRITERIA if args.all or c not in SLOW]
    worst = EXIT_OK
    for num in wanted:
        if num not in CRITERIA:
            print(f"unknown criterion {num}", file=sys.stderr)
            return EXIT_VALIDATION
        res = evaluate(num)
        print(res.line())
        if not res.passed:
            worst = 1
    return worst


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "accept":
        return _accept(args)
    from .linear_operator import KernelObstructionError, TailConditionError
    from .point_vortex import CollisionError
    from .fokker_planck import SingularSystemError
    from .rk import StepSizeError
    from .viscous import NumericalFailure

    numerical = (NumericalFailure, SingularSystemError, CollisionError, StepSizeError,
                 TailConditionError, FloatingPointError, ArithmeticError)
    log = (lambda msg: None) if args.quiet else (lambda msg: print(msg, file=sys.stderr, flush=True))
    try:
        spec = ExperimentSpec(args.name or (args.command if args.command != "scaling"
                                            else f"scaling_{args.kind}"),
                              args.command, _params(args), args.out, args.seed)
        run_dir = run_experiment(spec, log=log)
    except numerical as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValidationError, KernelObstructionError, ValueError, OSError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(run_dir)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
