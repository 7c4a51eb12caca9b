"""Write the separable-boundary table (c1_max, optimal squeezing, EPR-variance bound) to CSV."""

import argparse
import csv
import sys

from gauss_sep.cli import DEFAULT_GRID, SCAN_HEADER, parse_grid, scan_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default=DEFAULT_GRID)
    ap.add_argument("--out", default="-", help="output path, '-' for stdout")
    args = ap.parse_args()
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="", encoding="utf-8")
    with fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCAN_HEADER)
        for row in scan_rows(parse_grid(args.grid)):
            w.writerow([repr(x) for x in row])


if __name__ == "__main__":
    main()
