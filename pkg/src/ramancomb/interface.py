import argparse
import json
import logging
import sys
from pathlib import Path

from ramancomb import __version__
from ramancomb.data.figures import FIGURES, figure_names
from ramancomb.exceptions import (
    CapacityError,
    ConfigError,
    DomainError,
    RootShortfallError,
    TruncationError,
    WindowTooSmallError,
)
from ramancomb.model.interference import find_interference_zeros
from ramancomb.model.oracle import DEFAULT_TOLERANCE
from ramancomb.pipeline import cases_from_config, figure_tables, oracle_check, reports_frame, run_config
from ramancomb.utils.config import FORMATS, load
from ramancomb.utils.output import write_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_WINDOW = 4

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def window_option(value):
    """``auto`` or a non-negative sideband radius."""
    if value == "auto":
        return value
    try:
        radius = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or an integer radius, got {value!r}")
    if radius < 0:
        raise argparse.ArgumentTypeError("window radius must be non-negative")
    return radius


def positive_int(value):
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def build_parser():
    parser = argparse.ArgumentParser(
        prog="raman-comb",
        description="Quantum statistics of multiorder Raman sidebands",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Sweep a scenario file and write CSV
  raman-comb run --config fig2.json --out fig2.csv

  # Plot data of one published figure, one file per panel
  raman-comb figure fig6 --out data/ --format json

  # Closed forms against the Fock-space simulation
  raman-comb oracle-check --tolerance 1e-8

  # First three zeros of the two-photon coincidence probability
  raman-comb zeros --max-kappa-L 5 --count 3

Exit codes: 0 ok, 2 config error, 3 tolerance breach, 4 window too small.
        """,
    )
    parser.add_argument("--version", action="version", version=f"raman-comb {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Log debug output to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Evaluate a scenario config over its kappa_L sweep")
    run.add_argument("--config", required=True, help="Scenario JSON file")
    run.add_argument("--out", help="Output file (default: config output.path, else stdout)")
    run.add_argument("--format", choices=FORMATS, help="Output format (default: config, else csv)")
    run.add_argument("--window", type=window_option, help="'auto' or a sideband radius")
    run.add_argument("--jobs", type=positive_int, default=1, help="Worker processes (default: 1)")
    run.add_argument("--seed", type=int, help="Reserved; the engines are deterministic")

    figure = commands.add_parser("figure", help="Emit the plot data of a published figure")
    figure.add_argument("name", choices=figure_names())
    figure.add_argument("--out", default=".", help="Output directory (default: .)")
    figure.add_argument("--format", choices=FORMATS, default="csv")
    figure.add_argument("--jobs", type=positive_int, default=1)

    check = commands.add_parser("oracle-check", help="Compare the analytic engine with the oracle")
    check.add_argument("--config", help="Scenario JSON file (default: built-in suite)")
    check.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    check.add_argument("--window", type=window_option, default="auto", help="'auto' or a radius")
    check.add_argument("--out", help="Deviation report file (default: stdout)")
    check.add_argument("--format", choices=FORMATS, default="csv")

    zeros = commands.add_parser("zeros", help="Zeros of the coincidence probability W_01")
    zeros.add_argument("--max-kappa-L", type=float, default=5.0)
    zeros.add_argument("--count", type=positive_int, default=3)
    zeros.add_argument("--format", choices=("plain", "json"), default="plain")
    return parser


def command_run(args):
    config = load(args.config).replace(
        out=args.out, format=args.format, window=args.window, seed=args.seed
    )
    frame = run_config(config, jobs=args.jobs, progress=args.verbose)
    write_table(frame, config.output.path, config.output.format, config.to_dict())
    return EXIT_OK


def command_figure(args):
    spec = FIGURES[args.name]
    directory = Path(args.out)
    for panel, frame in figure_tables(args.name, jobs=args.jobs, progress=args.verbose).items():
        path = directory / f"{args.name}_{panel}.{args.format}"
        write_table(frame, path, args.format, {"figure": args.name, "caption": spec.caption, "panel": panel})
        print(path)
    return EXIT_OK


def command_oracle_check(args):
    cases = cases_from_config(load(args.config)) if args.config else None
    radius = None if args.window == "auto" else args.window
    reports = oracle_check(cases, radius=radius, tolerance=args.tolerance, progress=args.verbose)
    write_table(reports_frame(reports), args.out, args.format, {"tolerance": args.tolerance})
    failed = [report.label for report in reports if not report.passed]
    if failed:
        logger.error("tolerance breached in %d scenario(s): %s", len(failed), ", ".join(failed))
        return EXIT_TOLERANCE
    return EXIT_OK


def command_zeros(args):
    status = EXIT_OK
    try:
        roots = find_interference_zeros(args.max_kappa_L, count=args.count)
    except RootShortfallError as error:
        logger.warning("%s", error)
        roots, status = error.roots, EXIT_TOLERANCE
    if args.format == "json":
        print(json.dumps({"max_kappa_L": args.max_kappa_L, "zeros": roots}))
    else:
        for root in roots:
            print(f"{root:.12f}")
    return status


COMMANDS = {
    "run": command_run,
    "figure": command_figure,
    "oracle-check": command_oracle_check,
    "zeros": command_zeros,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as error:
        print(f"Error: {error}", file=sys.stderr)
        return EXIT_CONFIG
    except WindowTooSmallError as error:
        print(f"Error: {error}", file=sys.stderr)
        return EXIT_WINDOW
    except (CapacityError, TruncationError, DomainError) as error:
        print(f"Error: {error}", file=sys.stderr)
        return EXIT_CONFIG


def run():
    """Entry point of the ``raman-comb`` console script."""
    sys.exit(main())


if __name__ == "__main__":
    run()
