#!/usr/bin/env python3
"""Regenerate every figure dataset (CSV, JSON and SVG) into one directory."""

import argparse
import sys

from wvamp import cli
from wvamp.experiments import SCENARIOS


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures", help="output directory (default: ./figures)")
    ap.add_argument("--formats", nargs="+", default=["csv", "json", "svg"], choices=["csv", "json", "svg"])
    args = ap.parse_args()
    for which in SCENARIOS:
        for fmt in args.formats:
            code = cli.main(["figures", "--which", which, "--format", fmt, "--out", args.out])
            if code:
                return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
