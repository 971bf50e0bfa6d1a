"""plotkit command line: render figures from CSV/JSON artifacts."""

import argparse
import sys

from . import __version__
from .figures import KINDS, FigureSpec, SchemaError, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from shock-reflection CSV/JSON artifacts.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   help="input CSV file(s); transition_map takes "
                        "cells.csv curves.csv")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--pattern", help="pattern JSON with the junction marker "
                                     "(sim_field only)")
    p.add_argument("--title")
    p.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        spec = FigureSpec(kind=args.kind, inputs=args.inputs, output=args.out,
                          pattern=args.pattern, title=args.title,
                          dpi=args.dpi)
        out = render(spec)
    except SchemaError as e:
        print(f"plotkit render: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"plotkit render: {e}", file=sys.stderr)
        return 3
    sys.stdout.write(out + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
