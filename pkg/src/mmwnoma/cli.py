"""Command-line entry point for the experiment sweeps."""

import argparse
import sys

from .experiments import (
    ConfigError,
    ExperimentConfig,
    run_geometry_map,
    run_occurrence_report,
    run_power_sweep,
    run_snr_sweep,
    run_threshold_grid,
    verify_agreement,
)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_VERIFY_FAILED = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mmwnoma",
        description="Limited-feedback mmWave NOMA experiment sweeps (CSV output)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("snr-sweep", "hybrid rate vs transmit SNR per strategy"),
        ("threshold-grid", "two-bit hybrid rate over the threshold-coefficient grid"),
        ("power-sweep", "hybrid rate vs the strong user's power fraction"),
        ("geometry-map", "per-cell winner over (d_max, delta)"),
        ("occurrence", "closed-form vs empirical branch probabilities"),
    ):
        cmd = sub.add_parser(name, help=doc)
        cmd.add_argument("--config", help="config file (flat key = value text)")
        cmd.add_argument("--out", help="output CSV path (default: stdout)")
        cmd.add_argument("--trials", type=int, help="override trials.num")
        cmd.add_argument("--seed", type=int, help="override trials.seed")
        cmd.add_argument("--strategies", help="comma-separated strategy list")
        cmd.add_argument("--analytic-only", action="store_true",
                         help="skip the Monte Carlo columns")
        cmd.add_argument("--deterministic", action="store_true",
                         help="suppress the timestamp header line")
        cmd.add_argument("--verify", action="store_true",
                         help="fail (exit 3) if analytic and MC columns disagree "
                              "beyond 3 standard errors")
    return parser


def load_config(args):
    mapping = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as handle:
            text = handle.read()
        config = ExperimentConfig.from_text(text)
        mapping = dict(config.values)
    overrides = {}
    if args.trials is not None:
        overrides["trials.num"] = args.trials
    if args.seed is not None:
        overrides["trials.seed"] = args.seed
    if args.strategies:
        overrides["strategies"] = [s.strip() for s in args.strategies.split(",")]
    mapping.update(overrides)
    return ExperimentConfig.from_mapping(mapping)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    analytic_only = args.analytic_only
    if args.command == "snr-sweep":
        result = run_snr_sweep(config, analytic_only=analytic_only)
    elif args.command == "threshold-grid":
        result = run_threshold_grid(config)
    elif args.command == "power-sweep":
        result = run_power_sweep(config, analytic_only=analytic_only)
    elif args.command == "geometry-map":
        result = run_geometry_map(config)
    else:
        result = run_occurrence_report(config, analytic_only=analytic_only)

    text = result.to_csv_text(deterministic=args.deterministic)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)

    if args.verify and not analytic_only:
        bad = verify_agreement(result)
        if bad:
            print(f"verify: {len(bad)} rows disagree beyond 3 standard errors",
                  file=sys.stderr)
            return EXIT_VERIFY_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
