"""Command line interface: ``ea <experiment> [options]``.

Exit codes: 0 success, 1 validation failure or I/O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from erravg.acceptance import FAIL, format_report, run_all
from erravg.experiments import DEFAULT_SEED, EXPERIMENT_NAMES, ExperimentSpec, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ea",
        description="Error-averaging experiments for noisy linear-optical networks.",
    )
    parser.add_argument("experiment", choices=EXPERIMENT_NAMES, help="experiment to run")
    parser.add_argument("--v", type=float, default=None, help="phase-shifter variance (rad^2)")
    parser.add_argument("--N", type=int, default=None, help="redundancy factor")
    parser.add_argument("--M", type=int, default=None, help="phase shifters in series")
    parser.add_argument("--trials", type=int, default=None, help="Monte Carlo trials per point")
    parser.add_argument("--seed", type=int, default=None, help="master seed (64-bit)")
    parser.add_argument("--out", default=".", help="output directory for CSV and manifest files")
    parser.add_argument("--config", default=None, help="JSON file with default parameters")
    parser.add_argument(
        "--plot-script",
        action="store_true",
        help="also emit a gnuplot script next to the CSV outputs",
    )
    parser.add_argument(
        "--only",
        type=int,
        action="append",
        default=None,
        help="validate: run only this criterion number (repeatable)",
    )
    return parser


def _merged_parameters(args) -> dict:
    params: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError("config file must hold a JSON object")
        params.update(loaded)
    for key in ("v", "N", "M", "trials", "seed"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    return params


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params = _merged_parameters(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.experiment == "validate":
        try:
            results = run_all(
                seed=int(params.get("seed", DEFAULT_SEED)),
                trials=params.get("trials"),
                only=args.only,
            )
        except ValueError as exc:
            parser.error(str(exc))  # exits 2
        print(format_report(results))
        return 1 if any(r.status == FAIL for r in results) else 0

    try:
        files = run_experiment(ExperimentSpec(args.experiment, params), args.out, args.plot_script)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name in files:
        print(f"wrote {args.out}/{name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
