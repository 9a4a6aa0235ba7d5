"""Command-line entry point.

    antiplane validate <config>
    antiplane simulate <config> [--out DIR]
    antiplane reproduce figures-1-2-3|decay-scaling|shortwave-arrival [--out DIR]
    antiplane acceptance

The output directory is ``--out``, else $ANTIPLANE_OUTPUT_DIR, else
``./antiplane-out``. Exit codes: 0 success, 1 invalid config or failed
acceptance, 2 numerical instability, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import acceptance
from .config import ConfigError, validate
from .experiments import BUILTIN, run_experiment
from .fdm import InstabilityError
from .output import OutputError

__all__ = ["main", "build_parser", "output_dir", "ENV_OUTPUT_DIR"]

ENV_OUTPUT_DIR = "ANTIPLANE_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "antiplane-out"

EXIT_OK, EXIT_INVALID, EXIT_UNSTABLE, EXIT_IO = 0, 1, 2, 3


def output_dir(flag: str | None) -> Path:
    return Path(flag or os.environ.get(ENV_OUTPUT_DIR) or DEFAULT_OUTPUT_DIR)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="antiplane", description="Square-lattice step-load simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a config file and print the resolved settings")
    p.add_argument("config", type=Path)

    p = sub.add_parser("simulate", help="run the experiment described by a config file")
    p.add_argument("config", type=Path)
    p.add_argument("--out", help=f"output directory (default ${ENV_OUTPUT_DIR} or ./{DEFAULT_OUTPUT_DIR})")

    p = sub.add_parser("reproduce", help="run a built-in experiment")
    p.add_argument("experiment", choices=sorted(BUILTIN))
    p.add_argument("--out", help=f"output directory (default ${ENV_OUTPUT_DIR} or ./{DEFAULT_OUTPUT_DIR})")

    sub.add_parser("acceptance", help="run the acceptance suite and print a pass/fail table")
    return parser


def _report(result) -> None:
    print(f"wrote {len(result.files)} files to {result.directory}")
    for f in result.files:
        print(f"  {f.name}")
    fits = result.summary.get("fits")
    if fits:
        print(json.dumps({k: round(v["exponent"], 6) for k, v in fits.items()}, sort_keys=True))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            spec = validate(args.config)
            print("\n".join(spec.to_config_lines()))
            return EXIT_OK
        if args.command == "simulate":
            spec = validate(args.config)
            _report(run_experiment(spec, output_dir(args.out)))
            return EXIT_OK
        if args.command == "reproduce":
            _report(run_experiment(BUILTIN[args.experiment], output_dir(args.out)))
            return EXIT_OK
        if args.command == "acceptance":
            return EXIT_OK if acceptance.main() == 0 else EXIT_INVALID
    except ConfigError as exc:
        print(f"invalid config ({len(exc.errors)} problem{'s' if len(exc.errors) != 1 else ''}):", file=sys.stderr)
        for e in exc.errors:
            print(f"  {e}", file=sys.stderr)
        return EXIT_INVALID
    except InstabilityError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except OutputError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
