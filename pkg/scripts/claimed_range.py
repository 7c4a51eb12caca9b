"""Check on a fine grid that the brute-force argmax squeezing lies in [1, 2a] x [1, 2b]
and matches the closed-form optimum."""

import argparse

import numpy as np

from gauss_sep import criteria as cr
from gauss_sep.oracle import OracleConfig, search_c1max


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-ab", type=int, default=9)
    ap.add_argument("--n-t", type=int, default=11)
    ap.add_argument("--grid-points", type=int, default=120)
    args = ap.parse_args()
    cfg = OracleConfig(grid_points=args.grid_points)
    outside, worst_bound, worst_arg, n = 0, 0.0, 0.0, 0
    for a in np.linspace(0.5, 3.0, args.n_ab):
        for b in np.linspace(0.5, 3.0, args.n_ab):
            for t in np.linspace(0.05, 1.0, args.n_t):
                a_, b_, t_ = float(a), float(b), float(t)
                res = search_c1max(a_, b_, t_, cfg)
                opt = cr.optimal_squeezing(a_, b_, t_)
                n += 1
                outside += not res.in_claimed_range
                worst_bound = max(worst_bound, abs(res.c1_max - cr.explicit_bound(a_, b_, t_).c1_max))
                if a_ > 0.5 and b_ > 0.5:
                    # on the vacuum edge the objective is flat in one direction
                    worst_arg = max(worst_arg, abs(res.r1 - opt.r1) / opt.r1, abs(res.r2 - opt.r2) / opt.r2)
    print(f"points={n} outside_claimed_range={outside}")
    print(f"max |search - explicit_bound| = {worst_bound:.3e}")
    print(f"max relative argmax offset     = {worst_arg:.3e}")


if __name__ == "__main__":
    main()
