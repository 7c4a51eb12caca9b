"""Show a matrix V + (i/2) diag(J, J) with nonnegative determinant and a negative eigenvalue."""

import argparse
import json

from gauss_sep import criteria as cr
from gauss_sep.oracle import OracleConfig, det_vs_eig_counterexample
from gauss_sep.smallmat import herm_eigenvalues


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--b", type=float, default=1.0)
    args = ap.parse_args()
    ce = det_vs_eig_counterexample(OracleConfig(), a=args.a, b=args.b)
    eig = herm_eigenvalues(cr.uncertainty_matrix(ce.v, cr.Sign.PLUS))
    print(json.dumps(
        {
            "standard_form": {"a": args.a, "b": args.b, "c1": ce.c, "c2": ce.c},
            "determinant_turns_nonnegative_at_c": ce.c_threshold,
            "det": ce.det_value,
            "eigenvalues": eig.tolist(),
            "verdict": cr.separability_verdict(ce.v).verdict.value,
        },
        indent=2,
    ))


if __name__ == "__main__":
    main()
