"""analyze: figures and tables from an exported campaign directory."""

import argparse
import logging
import sys

from .index import CampaignError, CampaignIndex
from .plots import plot_cdfs
from .tables import compare_table


def cmd_plot(args) -> int:
    index = CampaignIndex.from_directory(args.campaign)
    for path in plot_cdfs(index, args.kpi, args.out):
        print(path)
    return 0


def cmd_table(args) -> int:
    index = CampaignIndex.from_directory(args.campaign)
    print(compare_table(index))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="analyze",
                                     description="Post-process campaign exports")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plot", help="CDF overlay per window policy")
    p.add_argument("--campaign", required=True, help="campaign root directory")
    p.add_argument("--kpi", required=True, choices=("pir", "simtx"))
    p.add_argument("--out", required=True, help="output image path")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("table", help="markdown table of per-cell medians")
    p.add_argument("--campaign", required=True, help="campaign root directory")
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CampaignError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
