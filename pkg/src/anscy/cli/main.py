"""Command-line entry point: ``anscy run <experiment>`` and ``anscy presets list``."""
from __future__ import annotations

import argparse
import sys
import warnings

from ..core import ConfigError
from .config_io import build_config, dump_config, read_overrides
from .presets import PRESETS
from .runner import run_experiment, with_overrides

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anscy", description="AN-aided multi-cell secrecy experiments")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment preset")
    run.add_argument("experiment", choices=sorted(PRESETS))
    run.add_argument("--config", help="key=value file overriding the preset parameters")
    run.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    run.add_argument("--seed", type=int, help="base random seed")
    run.add_argument("--out", help="output CSV path (default <experiment>.csv)")
    run.add_argument("--no-mc", action="store_true", help="skip Monte Carlo columns")
    run.add_argument("--vector-channels", action="store_true",
                     help="simulate full antenna vectors instead of scalar gain laws")

    pre = sub.add_parser("presets", help="inspect presets")
    pre_sub = pre.add_subparsers(dest="action", required=True)
    pre_sub.add_parser("list", help="list experiment names")
    show = pre_sub.add_parser("show", help="print a preset's base configuration")
    show.add_argument("experiment", choices=sorted(PRESETS))
    return p


def _run(args) -> int:
    spec = PRESETS[args.experiment]
    overrides = {}
    if args.config:
        overrides, text = read_overrides(args.config)
        # validate against the preset before running
        build_config(overrides, spec.base, text, args.config)
    fields = {}
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("--trials must be positive")
        fields["trials"] = args.trials
    if args.seed is not None:
        fields["seed"] = args.seed
    if args.out:
        fields["out_path"] = args.out
    spec = with_overrides(spec, overrides, **fields)
    result = run_experiment(spec, mc_enabled=not args.no_mc, vector_channels=args.vector_channels)
    print(f"wrote {result.csv_path} ({len(result.rows)} rows)")
    if "feasible" in result.columns and not result.any_feasible:
        print("no feasible point in the sweep", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "presets":
            if args.action == "list":
                for name, spec in PRESETS.items():
                    print(f"{name:22s} {spec.description}")
            else:
                sys.stdout.write(dump_config(PRESETS[args.experiment].base))
            return EXIT_OK
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return _run(args)
    except (ConfigError, ValueError, OSError, RuntimeError) as exc:
        print(f"anscy: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
