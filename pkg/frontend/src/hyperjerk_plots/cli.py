"""Script entry point: render figures from benchmark CSV files.

    hyperjerk-plots histograms trials.csv --component 1 -o fig/sampling_theta1
    hyperjerk-plots likelihood likelihood_theta1.csv -o fig/likelihood_theta1
    hyperjerk-plots all RUN_DIR -o fig/

Each figure is written as both PNG and SVG.  Exit codes: 0 success,
1 unreadable or empty input, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .figures import plot_histograms, plot_likelihood, render_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperjerk-plots", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    hist = subs.add_parser("histograms", help="per-window-size sampling histograms")
    hist.add_argument("trials_csv")
    hist.add_argument("--component", type=int, default=1, help="1-based parameter index")
    hist.add_argument("-o", "--out", required=True, help="output stem (writes .png and .svg)")

    like = subs.add_parser("likelihood", help="scan objective curve")
    like.add_argument("curve_csv")
    like.add_argument("-o", "--out", required=True, help="output stem (writes .png and .svg)")

    every = subs.add_parser("all", help="all four standard figures from a run directory")
    every.add_argument("run_dir")
    every.add_argument("-o", "--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "histograms":
            info = plot_histograms(args.trials_csv, args.component, args.out)
            print(f"wrote {info.paths['png']} and {info.paths['svg']} ({info.panels} panels)")
        elif args.command == "likelihood":
            info = plot_likelihood(args.curve_csv, args.out)
            print(f"wrote {info.paths['png']} and {info.paths['svg']}")
        else:
            outputs = render_all(args.run_dir, args.out)
            for name, info in outputs.items():
                print(f"wrote {info.paths['png']} and {info.paths['svg']}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
