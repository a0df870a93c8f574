"""Command-line entry point: asymfig --input FILE --kind KIND --out IMAGE."""

from __future__ import annotations

import argparse
import json
import sys

from .render import FigureSpec, InputError, KINDS, render


def _range(text):
    lo, hi = text.split(":")
    return (float(lo), float(hi))


def build_parser():
    ap = argparse.ArgumentParser(
        prog="asymfig",
        description="render figures from asymren CSV output files")
    ap.add_argument("--input", required=True, help="CSV file from asymren")
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--x-range", type=_range, metavar="LO:HI")
    ap.add_argument("--y-range", type=_range, metavar="LO:HI")
    ap.add_argument("--zoom", action="append", type=_range, metavar="LO:HI",
                    default=[],
                    help="bifurcation only: inset window (repeatable)")
    ap.add_argument("--dpi", type=int, default=150)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    spec = FigureSpec(input=args.input, kind=args.kind, out=args.out,
                      x_range=args.x_range, y_range=args.y_range,
                      zoom=tuple(args.zoom), dpi=args.dpi)
    try:
        summary = render(spec)
    except (InputError, OSError) as exc:
        print(f"asymfig: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(summary, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
