"""``gauss-sep`` command-line front end.

Exit codes for ``check``: 0 Separable, 1 Entangled, 2 Unphysical,
3 Boundary, 64 input error. ``verify`` exits 1 when any check fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional

import numpy as np

from . import criteria as cr
from .errors import ContractError, GaussSepError
from .gaussian_state import CovarianceMatrix, StandardForm, to_standard_form
from .oracle import OracleConfig, random_physical_covariance
from .smallmat import TOL_PSD
from .verification import Sizes, report_dict, run_all

EXIT_INPUT = 64
EXIT_CODES = {
    cr.Verdict.SEPARABLE: 0,
    cr.Verdict.ENTANGLED: 1,
    cr.Verdict.UNPHYSICAL: 2,
    cr.Verdict.BOUNDARY: 3,
}
SCAN_HEADER = ["a", "b", "t", "c1_max", "r1", "r2", "dgcz16_bound", "hierarchy_gap"]
DEFAULT_GRID = "a=0.5:3:6,b=0.5:3:6,t=0:1:11"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def _text(obj, prefix="") -> str:
    lines = []
    for key, val in obj.items():
        if isinstance(val, dict):
            lines.append(f"{prefix}{key}:")
            lines.append(_text(val, prefix + "  "))
        else:
            lines.append(f"{prefix}{key}: {val}")
    return "\n".join(lines)


def _emit(obj: dict, fmt: str, out) -> None:
    out.write((_text(obj) if fmt == "text" else _dump(obj)) + "\n")


def load_state(args) -> CovarianceMatrix:
    """Covariance from ``--input`` (full matrix or standard form) or from flags."""
    if args.input:
        try:
            with open(args.input, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON in {args.input}: {exc}") from exc
        if not isinstance(data, dict):
            raise InputError("input must be a JSON object")
        try:
            if "v" in data:
                return CovarianceMatrix.from_json_dict(data)
            return StandardForm.from_dict(data).covariance()
        except ContractError as exc:
            raise InputError(str(exc)) from exc
    vals = [args.a, args.b, args.c1, args.c2]
    if any(x is None for x in vals):
        raise InputError("give --input PATH or all of --a --b --c1 --c2")
    return StandardForm(*vals).covariance()


def cmd_check(args, out) -> int:
    v = load_state(args)
    report = cr.separability_verdict(v, tol=args.tol)
    _emit(report.to_dict(), args.format, out)
    return EXIT_CODES[report.verdict]


def cmd_reduce(args, out) -> int:
    v = load_state(args)
    try:
        sf, s = to_standard_form(v, tol=args.tol)
    except ContractError as exc:
        raise InputError(str(exc)) from exc
    rec = {**sf.to_dict(), "t": sf.t, "s1": s.s1.tolist(), "s2": s.s2.tolist()}
    _emit(rec, args.format, out)
    return 0


def _check_abt(a, b, t):
    if a is None or b is None or t is None:
        raise InputError("need --a, --b and --t")
    if a < 0.5 or b < 0.5 or not 0.0 <= t <= 1.0:
        raise InputError(f"need a, b >= 0.5 and 0 <= t <= 1, got a={a}, b={b}, t={t}")


def bound_record(a: float, b: float, t: float) -> dict:
    bound = cr.explicit_bound(a, b, t).c1_max
    opt = cr.optimal_squeezing(a, b, t)
    simon = cr.simon_det_criterion(StandardForm(a, b, bound, -t * bound))
    return {
        "a": a,
        "b": b,
        "t": t,
        "c1_max": bound,
        "r1": opt.r1,
        "r2": opt.r2,
        "dgcz16_bound": cr.dgcz_standard_bound(a, b, t),
        "simon_margin_at_boundary": simon,
    }


def cmd_bound(args, out) -> int:
    _check_abt(args.a, args.b, args.t)
    rec = bound_record(args.a, args.b, args.t)
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(list(rec))
        w.writerow([repr(x) for x in rec.values()])
    else:
        _emit(rec, args.format, out)
    return 0


def parse_grid(text: str) -> dict:
    """Parse ``"a=lo:hi:n,b=lo:hi:n,t=lo:hi:n"`` into inclusive linspaces."""
    axes = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            name, rng = part.split("=")
            lo, hi, n = rng.split(":")
            lo, hi, n = float(lo), float(hi), int(n)
        except ValueError as exc:
            raise InputError(f"bad grid axis {part!r}; expected name=lo:hi:count") from exc
        name = name.strip()
        if name not in ("a", "b", "t"):
            raise InputError(f"unknown grid axis {name!r}")
        if n < 1 or hi < lo or (n == 1 and hi != lo):
            raise InputError(f"empty or inconsistent range for axis {name!r}: {rng}")
        axes[name] = np.linspace(lo, hi, n)
    missing = {"a", "b", "t"} - set(axes)
    if missing:
        raise InputError(f"grid is missing axes {sorted(missing)}")
    if axes["a"][0] < 0.5 or axes["b"][0] < 0.5:
        raise InputError("grid a and b must be >= 0.5")
    if axes["t"][0] < 0.0 or axes["t"][-1] > 1.0:
        raise InputError("grid t must lie in [0, 1]")
    return axes


def scan_rows(axes: dict):
    for a in axes["a"]:
        for b in axes["b"]:
            for t in axes["t"]:
                a_, b_, t_ = float(a), float(b), float(t)
                bound = cr.explicit_bound(a_, b_, t_).c1_max
                opt = cr.optimal_squeezing(a_, b_, t_)
                dg = cr.dgcz_standard_bound(a_, b_, t_)
                yield [a_, b_, t_, bound, opt.r1, opt.r2, dg, dg - bound]


def cmd_scan(args, out) -> int:
    axes = parse_grid(args.grid)
    rows = list(scan_rows(axes))
    if args.format == "json":
        out.write(_dump([dict(zip(SCAN_HEADER, r)) for r in rows]) + "\n")
        return 0
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for r in rows:
        w.writerow([repr(x) for x in r])
    return 0


def cmd_random(args, out) -> int:
    v = random_physical_covariance(args.seed)
    _emit(v.to_json_dict(), "json" if args.format == "csv" else args.format, out)
    return 0


def cmd_verify(args, out) -> int:
    cfg = OracleConfig(seed=args.seed)
    sizes = Sizes.quick() if args.quick else Sizes()
    only = {int(x) for x in args.only.split(",")} if args.only else None
    results = run_all(cfg, sizes, inject_fault=args.inject_d_fault, only=only)
    if args.format == "text":
        for r in results:
            out.write(r.line() + "\n")
    else:
        out.write(_dump(report_dict(results, cfg, sizes, args.inject_d_fault)) + "\n")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gauss-sep", description="Separability of two-mode Gaussian states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt_default="json", formats=("json", "csv", "text")):
        sp.add_argument("--tol", type=float, default=TOL_PSD, help="positivity tolerance")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=formats, default=fmt_default)

    for name in ("check", "reduce"):
        sp = sub.add_parser(name)
        sp.add_argument("--input", help="covariance or standard-form JSON file")
        for flag in ("--a", "--b", "--c1", "--c2"):
            sp.add_argument(flag, type=float)
        common(sp, formats=("json", "text"))

    sp = sub.add_parser("bound")
    for flag in ("--a", "--b", "--t"):
        sp.add_argument(flag, type=float)
    common(sp)

    sp = sub.add_parser("scan")
    sp.add_argument("--grid", default=DEFAULT_GRID, help="e.g. %(default)s")
    common(sp, fmt_default="csv", formats=("csv", "json"))

    sp = sub.add_parser("random")
    common(sp)

    sp = sub.add_parser("verify")
    sp.add_argument("--quick", action="store_true", help="reduced sample sizes")
    sp.add_argument("--only", help="comma-separated check numbers")
    sp.add_argument(
        "--inject-d-fault",
        action="store_true",
        help="test hook: perturb the D polynomial by +0.01 (checks 1-3 must fail)",
    )
    common(sp, fmt_default="json", formats=("json", "text"))
    return p


COMMANDS = {
    "check": cmd_check,
    "reduce": cmd_reduce,
    "bound": cmd_bound,
    "scan": cmd_scan,
    "random": cmd_random,
    "verify": cmd_verify,
}


def main(argv: Optional[list] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if args.tol <= 0:
        print("gauss-sep: error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args, out)
    except (InputError, ContractError) as exc:
        print(f"gauss-sep: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GaussSepError as exc:
        print(f"gauss-sep: numerical failure: {exc}", file=sys.stderr)
        return 70


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
