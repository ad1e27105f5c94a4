"""fvhydro-plots command line: render panels from a run directory."""

from __future__ import annotations

import argparse
import sys

from .reader import RunDataError, load_run
from .render import PANELS, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fvhydro-plots",
                                     description="Figure generator for fvhydro run outputs.")
    subs = parser.add_subparsers(dest="command", required=True)
    rend = subs.add_parser("render", help="render panels from one run directory")
    rend.add_argument("--run", required=True, help="fvhydro run directory")
    rend.add_argument("--panels", default=",".join(PANELS),
                      help=f"comma-separated subset of: {', '.join(PANELS)}")
    rend.add_argument("--out", required=True, help="output directory for PNG files")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    panels = [tok for tok in args.panels.split(",") if tok]
    try:
        run = load_run(args.run)
        written = render(run, panels, args.out)
    except RunDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
