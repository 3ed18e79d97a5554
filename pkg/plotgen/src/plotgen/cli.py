"""Command line entry point: ``plotgen <csv> --axis <col> --out <path>``."""

import argparse
import sys

from .figure import FigureSpec, PlotgenError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotgen",
        description="Render a simulation sweep CSV into a per-scheme figure.",
    )
    parser.add_argument("csv", help="input CSV file")
    parser.add_argument("--axis", required=True,
                        help="column to use for the x axis (e.g. budget)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--bands", action="store_true",
                        help="shade 95%% confidence bands around each curve")
    parser.add_argument("--series", default="scheme",
                        help="column that names the curves (default: scheme)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(csv_path=args.csv, axis=args.axis, out_path=args.out,
                      bands=args.bands, series=args.series)
    try:
        render(spec)
    except (PlotgenError, OSError) as exc:
        print(f"plotgen: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
