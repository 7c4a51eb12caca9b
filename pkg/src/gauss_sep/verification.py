"""Acceptance checks, shared by ``gauss-sep verify`` and the test suite.

Each check returns a :class:`CheckResult` carrying its worst-case deviation
and the tolerance it was held to. Reports contain no timings, so a fixed seed
gives byte-identical output.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from . import criteria as cr
from .errors import NotFoundError
from .gaussian_state import (
    CovarianceMatrix,
    StandardForm,
    apply_symplectic,
    is_physical,
    p_condition,
    to_standard_form,
)
from .oracle import (
    OracleConfig,
    det_vs_eig_counterexample,
    mc_p_roundtrip,
    random_physical_covariance,
    search_c1max,
)
from .smallmat import psd_margin

GRID_AB = (0.5, 0.75, 1.0, 1.5, 2.0, 3.0)
GRID_T = tuple(i / 10 for i in range(11))


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    worst: float
    tol: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: worst={self.worst:.3e} tol={self.tol:.1e}"


@dataclass(frozen=True)
class Sizes:
    n_random: int = 10_000
    mc_states: int = 20
    mc_samples: int = 1_000_000

    @classmethod
    def quick(cls) -> Sizes:
        return cls(n_random=500, mc_states=4, mc_samples=100_000)


def _grid(t_positive: bool = False):
    for a in GRID_AB:
        for b in GRID_AB:
            for t in GRID_T:
                if t_positive and t == 0.0:
                    continue
                yield a, b, t


def check_bound_vs_oracle(cfg: OracleConfig) -> CheckResult:
    tol = 1e-5
    worst, at = 0.0, None
    out_of_range = []
    for a, b, t in _grid():
        s = search_c1max(a, b, t, cfg)
        dev = abs(cr.explicit_bound(a, b, t).c1_max - s.c1_max)
        if dev >= worst:
            worst, at = dev, (a, b, t)
        if s.c1_max > 0 and not s.in_claimed_range:
            out_of_range.append((a, b, t, s.r1, s.r2))
    return CheckResult(
        1, "explicit bound vs brute-force oracle", worst <= tol, worst, tol,
        {"worst_at": at, "argmax_outside_claimed_range": out_of_range},
    )


def check_triple_equality() -> CheckResult:
    tol = 1e-9
    worst, at = 0.0, None
    for a, b, t in _grid(t_positive=True):
        opt = cr.optimal_squeezing(a, b, t)
        q, p, _ = cr.p_rep_bound_expressions(a, b, t, opt.r1, opt.r2)
        bound = cr.explicit_bound(a, b, t).c1_max
        dev = max(abs(q - p), abs(q - bound))
        if dev >= worst:
            worst, at = dev, (a, b, t)
    return CheckResult(2, "P-condition ceilings equal at optimal squeezing", worst <= tol, worst, tol,
                       {"worst_at": at})


def check_boundary_residuals() -> CheckResult:
    tol = 1e-10
    worst, at = 0.0, None
    for a, b, t in _grid(t_positive=True):
        opt = cr.optimal_squeezing(a, b, t)
        dev = max(opt.residual_22, opt.residual_23)
        if dev >= worst:
            worst, at = dev, (a, b, t)
    return CheckResult(3, "boundary equations at optimal squeezing", worst <= tol, worst, tol,
                       {"worst_at": at})


def random_standard_forms(n: int, seed: int):
    """Physical canonical standard forms with ``a, b`` uniform on ``[0.5, 3]``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        a, b = rng.uniform(0.5, 3.0, 2)
        c1 = rng.uniform(0.0, math.sqrt(a * b))
        c2 = rng.uniform(-c1, c1)
        sf = StandardForm(float(a), float(b), float(c1), float(c2))
        if is_physical(sf.covariance()).is_psd:
            out.append(sf)
    return out


def check_criterion_equivalence(n: int, seed: int) -> CheckResult:
    band = 1e-8
    disagreements, skipped, entangled = 0, 0, 0
    for sf in random_standard_forms(n, seed):
        bound = cr.explicit_bound(sf.a, sf.b, sf.t or 0.0).c1_max
        margin = bound - abs(sf.c1)
        ppt = cr.ppt_full(sf.covariance())
        entangled += not ppt.is_psd
        if abs(margin) <= band * max(1.0, sf.a, sf.b):
            skipped += 1
            continue
        disagreements += (margin >= 0) != ppt.is_psd
    return CheckResult(
        4, "explicit-bound verdict equals PPT eigenvalue verdict", disagreements == 0,
        float(disagreements), 0.0, {"n": n, "in_band": skipped, "entangled": entangled},
    )


def check_prep_implies_ppt(n: int, seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    violations, representable = 0, 0
    for _ in range(n):
        v = random_physical_covariance(rng)
        sf, _ = to_standard_form(v)
        opt = cr.optimal_squeezing(max(sf.a, 0.5), max(sf.b, 0.5), sf.t or 0.0)
        squeezed = apply_symplectic(sf.covariance(), opt.params().symplectic())
        if p_condition(squeezed).is_psd:
            representable += 1
            violations += not cr.ppt_full(v).is_psd
    return CheckResult(
        5, "P-representable after optimal squeeze implies PPT", violations == 0,
        float(violations), 0.0, {"n": n, "p_representable": representable},
    )


def check_det_insufficiency(cfg: OracleConfig) -> CheckResult:
    tol = 1e-6
    try:
        ce = det_vs_eig_counterexample(cfg)
    except NotFoundError:
        return CheckResult(6, "nonnegative determinant without positivity", False, 0.0, -tol,
                           {"error": "no counterexample found"})
    m = psd_margin(cr.uncertainty_matrix(ce.v, cr.Sign.PLUS), tol=1e-12)
    report = cr.separability_verdict(ce.v)
    ok = ce.det_value >= 0 and m.min_eigenvalue <= -tol and not m.is_psd
    ok = ok and report.verdict in (cr.Verdict.UNPHYSICAL, cr.Verdict.ENTANGLED)
    return CheckResult(
        6, "nonnegative determinant without positivity", ok, m.min_eigenvalue, -tol,
        {"c": ce.c, "det": ce.det_value, "c_threshold": ce.c_threshold, "verdict": report.verdict.value},
    )


def check_hierarchy() -> CheckResult:
    tol_gap, tol_26 = 1e-10, 1e-9
    min_gap, worst_t1, worst_26 = math.inf, 0.0, 0.0
    for a, b, t in _grid():
        bound = cr.explicit_bound(a, b, t).c1_max
        gap = cr.dgcz_standard_bound(a, b, t) - bound
        min_gap = min(min_gap, gap)
        if t == 1.0:
            worst_t1 = max(worst_t1, abs(gap))
        if t > 0:
            opt = cr.optimal_squeezing(a, b, t)
            sf = StandardForm(a, b, bound, -t * bound)
            worst_26 = max(worst_26, abs(cr.dgcz_squeezed_margin(sf, opt.r1, opt.r2).value))
    ok = min_gap >= -tol_gap and worst_t1 <= tol_gap and worst_26 <= tol_26
    worst = max(-min_gap, worst_t1, worst_26, 0.0)
    return CheckResult(
        7, "EPR-variance bound dominates explicit bound", ok, worst, tol_gap,
        {"min_gap": min_gap, "max_gap_at_t1": worst_t1, "max_dgcz26_at_boundary": worst_26},
    )


def _rel(x, y, scale):
    return abs(x - y) / max(abs(x), abs(y), scale)


def check_standard_form_roundtrip(n: int, seed: int) -> CheckResult:
    tol = 1e-9
    rng = np.random.default_rng(seed)
    worst_entry, worst_inv = 0.0, 0.0
    for _ in range(n):
        v = random_physical_covariance(rng)
        sf, s = to_standard_form(v)
        back = apply_symplectic(sf.covariance(), s.inverse()).v
        worst_entry = max(worst_entry, float(np.max(np.abs(back - v.v))))
        w = sf.covariance()
        # quantities that may cancel to zero are compared at the natural scale
        m2 = float(np.max(np.abs(v.v))) ** 2
        for x, y, sc in (
            (np.linalg.det(v.A), np.linalg.det(w.A), m2),
            (np.linalg.det(v.B), np.linalg.det(w.B), m2),
            (np.linalg.det(v.C), np.linalg.det(w.C), m2),
            (np.linalg.det(v.v), np.linalg.det(w.v), m2 * m2),
        ):
            worst_inv = max(worst_inv, _rel(x, y, 1e-3 * sc))
    ok = worst_entry <= tol and worst_inv <= tol
    return CheckResult(
        8, "standard-form reduction round trip", ok, max(worst_entry, worst_inv), tol,
        {"n": n, "max_entry_error": worst_entry, "max_invariant_rel_error": float(worst_inv)},
    )


def mc_test_states(n_states: int, seed: int):
    """Strictly P-representable states: half generic, half optimally squeezed
    boundary states with ``c1`` pulled inward by 0.05."""
    rng = np.random.default_rng(seed)
    states = []
    while len(states) < n_states:
        if len(states) % 2 == 0:
            g = rng.normal(size=(4, 4))
            v = CovarianceMatrix(0.5 * np.eye(4) + 0.25 * g @ g.T + 0.05 * np.eye(4))
        else:
            a, b = rng.uniform(0.75, 3.0, 2)
            t = rng.uniform(0.1, 1.0)
            c1 = cr.explicit_bound(a, b, t).c1_max - 0.05
            if c1 <= 0:
                continue
            opt = cr.optimal_squeezing(a, b, t)
            sf = StandardForm(float(a), float(b), c1, -t * c1)
            v = apply_symplectic(sf.covariance(), opt.params().symplectic())
        if p_condition(v).min_eigenvalue >= 1e-6:
            states.append(v)
    return states


def check_monte_carlo(n_states: int, n_samples: int, seed: int) -> CheckResult:
    worst_ratio, worst_dev = 0.0, 0.0
    for k, v in enumerate(mc_test_states(n_states, seed)):
        rep = mc_p_roundtrip(v, n_samples, seed + 1000 + k)
        worst_ratio = max(worst_ratio, rep.max_sigma_ratio)
        worst_dev = max(worst_dev, rep.max_deviation)
    return CheckResult(
        9, "P-function Monte-Carlo round trip", worst_ratio < 5.0, worst_ratio, 5.0,
        {"states": n_states, "samples": n_samples, "max_abs_deviation": worst_dev},
    )


def check_fault_injection(cfg: OracleConfig) -> CheckResult:
    with cr.inject_d_fault(0.01):
        results = [check_bound_vs_oracle(cfg), check_triple_equality(), check_boundary_residuals()]
    failed = [r.number for r in results if not r.passed]
    return CheckResult(
        10, "perturbed D is caught by checks 1-3", len(failed) == 3, float(len(failed)), 3.0,
        {"failed_under_fault": failed, "worst_under_fault": [r.worst for r in results]},
    )


def all_checks(cfg: OracleConfig, sizes: Sizes) -> list[tuple[int, Callable[[], CheckResult]]]:
    seed = cfg.seed
    return [
        (1, lambda: check_bound_vs_oracle(cfg)),
        (2, check_triple_equality),
        (3, check_boundary_residuals),
        (4, lambda: check_criterion_equivalence(sizes.n_random, seed)),
        (5, lambda: check_prep_implies_ppt(sizes.n_random, seed + 1)),
        (6, lambda: check_det_insufficiency(cfg)),
        (7, check_hierarchy),
        (8, lambda: check_standard_form_roundtrip(sizes.n_random, seed + 2)),
        (9, lambda: check_monte_carlo(sizes.mc_states, sizes.mc_samples, seed + 3)),
        (10, lambda: check_fault_injection(cfg)),
    ]


def run_all(
    cfg: Optional[OracleConfig] = None,
    sizes: Optional[Sizes] = None,
    inject_fault: bool = False,
    only: Optional[set] = None,
) -> list[CheckResult]:
    cfg = cfg or OracleConfig()
    sizes = sizes or Sizes()
    results = []
    for number, fn in all_checks(cfg, sizes):
        if only and number not in only:
            continue
        if inject_fault and number != 10:
            with cr.inject_d_fault(0.01):
                results.append(fn())
        else:
            results.append(fn())
    return results


def report_dict(results: list[CheckResult], cfg: OracleConfig, sizes: Sizes, inject_fault: bool) -> dict:
    return {
        "config": {**asdict(cfg), **asdict(sizes), "inject_d_fault": inject_fault},
        "passed": all(r.passed for r in results),
        "checks": [asdict(r) for r in results],
    }
