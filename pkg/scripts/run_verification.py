"""Run the ten acceptance checks and print one line per check, plus timings."""

import argparse
import sys
import time

from gauss_sep.oracle import OracleConfig
from gauss_sep.verification import Sizes, all_checks


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    cfg = OracleConfig(seed=args.seed)
    sizes = Sizes.quick() if args.quick else Sizes()
    ok = True
    for _, fn in all_checks(cfg, sizes):
        start = time.perf_counter()
        r = fn()
        print(f"{r.line()}  [{time.perf_counter() - start:.1f}s]", flush=True)
        ok &= r.passed
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
