"""Regenerate the four benchmark tables as CSV files.

    python scripts/reproduce_tables.py --out results            # everything
    python scripts/reproduce_tables.py --suite area-2d times-2d # the quick 2-D ones

The volume-4d suite solves 45^4 grids with up to 256 directions and takes
well over an hour on a single core.
"""

import argparse
import sys
import time
from pathlib import Path

from r1ce.tables import DEFAULTS, SUITES, run_suite, to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--suite", nargs="+", default=list(SUITES), choices=SUITES)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for suite in args.suite:
        t0 = time.perf_counter()
        rows = run_suite(DEFAULTS[suite], log=lambda m: print("  " + m, file=sys.stderr))
        path = out / f"{suite}.csv"
        path.write_text(to_csv(rows))
        print(f"{suite}: {path} ({time.perf_counter() - t0:.0f}s)")


if __name__ == "__main__":
    main()
