"""Command-line wrapper: one MAT file in, one CSV out.

Exit codes: 0 success, 1 conversion/validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .convert import ConvertError, convert


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ninapro-convert",
        description="Convert a Ninapro DB6 MAT session to the raw signal CSV schema",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("mat", help="path to the session .mat file")
    parser.add_argument("--subject", type=int, required=True)
    parser.add_argument("--day", type=int, required=True, help="recording day, 1-5")
    parser.add_argument("--slot", type=int, required=True, help="daily time slot, 1 or 2")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--fs", type=float, default=None,
                        help="sample rate override when the file lacks one")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rows = convert(args.mat, args.subject, args.day, args.slot, args.out, fs=args.fs)
    except ConvertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {rows} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
