"""Command line entry point: ``formda {run,validate,props,list-problems}``."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .config import PROBLEMS, ConfigError, load_config, validate_config
from .props import property_suite
from .runner import run_experiment


def _run(args) -> int:
    try:
        summary = run_experiment(load_config(args.config), output_dir=args.output, workers=args.workers)
    except (ConfigError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    for w in summary.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for r in summary.runs:
        gap = r["final_gap_true"]
        print(f"{r['solver']:<12} seed={r['seed']:<4} iters={r['iterations']:<7} stop={r['stop_reason']:<16} "
              f"gap_true={'n/a' if gap is None else format(gap, '.4g')} "
              f"gap_surrogate={r['final_gap_surrogate']:.4g}")
    print(f"wrote {summary.summary_path}")
    return 0


def _validate(args) -> int:
    report = validate_config(args.config)
    print(report)
    return 0 if report.passed else 1


def _props(args) -> int:
    report = property_suite(args.seed, size=args.size)
    print(report)
    return 0 if report.passed else 1


def _list(args) -> int:
    for name, (_, params, desc) in sorted(PROBLEMS.items()):
        print(f"{name}: {desc}")
        print(f"    parameters: {', '.join(params)}, x_init, y_init")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="formda", description="Regularized momentum descent-ascent experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("config")
    p.add_argument("--output", help="override the config's output_dir")
    p.add_argument("--workers", type=int, help="parallel runs (default: $FORMDA_WORKERS or 1)")
    p.set_defaults(func=_run)
    p = sub.add_parser("validate", help="check a config without running it")
    p.add_argument("config")
    p.set_defaults(func=_validate)
    p = sub.add_parser("props", help="run the randomized property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=200, help="trials per randomized family")
    p.set_defaults(func=_props)
    p = sub.add_parser("list-problems", help="list registered problems")
    p.set_defaults(func=_list)
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
