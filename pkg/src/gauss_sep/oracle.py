"""Brute-force and randomized verifiers for the closed-form criteria.

Nothing here calls ``d_polynomial``, ``explicit_bound`` or
``optimal_squeezing``; the search works directly on the P-condition of the
squeezed standard form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import minimize

from .criteria import (
    Sign,
    p_rep_bound_expressions,
    ppt_det,
    quadratic_form_margin,
    uncertainty_matrix,
)
from .errors import ContractError, NotFoundError
from .gaussian_state import (
    CovarianceMatrix,
    StandardForm,
    build_p_function,
    is_physical,
    sample_p_function,
)
from .smallmat import psd_margin

INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class OracleConfig:
    grid_points: int = 200
    refine_iters: int = 60
    seed: int = 0
    tol: float = 1e-7
    n_starts: int = 16

    def __post_init__(self):
        if self.grid_points < 10:
            raise ContractError("grid_points must be >= 10")
        if self.refine_iters < 10:
            raise ContractError("refine_iters must be >= 10")
        if not self.tol > 0:
            raise ContractError("tol must be positive")
        if self.n_starts < 0:
            raise ContractError("n_starts must be >= 0")


def golden_max(f, lo: float, hi: float, iters: int):
    """Golden-section maximization of a unimodal ``f`` on ``[lo, hi]``.

    Ties move the bracket toward ``lo``. Returns ``(x, f(x))`` for the best
    point evaluated.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = max((f(lo), lo), (f(hi), hi), (fc, c), (fd, d), key=lambda p: (p[0], -p[1]))
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            cand = (fc, c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            cand = (fd, d)
        if cand[0] > best[0]:
            best = cand
    return best[1], best[0]


@dataclass(frozen=True)
class C1MaxSearch:
    c1_max: float
    r1: float
    r2: float
    in_claimed_range: bool


def _objective(a, b, t):
    def value(r1, r2):
        q, p, _ = p_rep_bound_expressions(a, b, t, r1, r2)
        return min(q, p)

    return value


def search_c1max(a: float, b: float, t: float, cfg: Optional[OracleConfig] = None) -> C1MaxSearch:
    """Maximize the admissible ``|c1|`` over squeezings ``(r1, r2)``.

    A log-spaced grid over ``[0.1, 4 max(2a, 2b)]^2`` locates the maximum;
    it is then refined by golden-section over ``log r1`` with, for each
    ``r1``, an inner golden-section over ``log r2``. The inner problem is the
    max of a min of an increasing and a decreasing function of ``r2``, hence
    unimodal. Refinement runs over the region where the diagonal of
    ``V - I/2`` is nonnegative (``1/(2a) <= r1 <= 2a``, same for ``r2``);
    outside it no ``|c1|`` is admissible. The grid maximum is kept if the
    refinement ever does worse.
    """
    cfg = cfg or OracleConfig()
    if not (a >= 0.5 and b >= 0.5 and 0.0 <= t <= 1.0):
        raise ContractError(f"need a, b >= 1/2 and t in [0, 1], got ({a}, {b}, {t})")
    value = _objective(a, b, t)
    hi = 4 * max(2 * a, 2 * b)
    grid = np.geomspace(0.1, hi, cfg.grid_points)
    R1, R2 = np.meshgrid(grid, grid, indexing="ij")
    q = np.sqrt(np.clip(a * R1 - 0.5, 0, None) * np.clip(b * R2 - 0.5, 0, None) / (R1 * R2))
    fp = np.clip(a / R1 - 0.5, 0, None) * np.clip(b / R2 - 0.5, 0, None)
    if t > 0:
        p = np.sqrt(fp * R1 * R2) / t
    else:
        p = np.where((a / R1 >= 0.5) & (b / R2 >= 0.5), np.inf, 0.0)
    vals = np.minimum(q, p)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)

    lo1, hi1 = math.log(0.5 / a), math.log(2 * a)
    lo2, hi2 = math.log(0.5 / b), math.log(2 * b)

    def inner(log_r1):
        r1 = math.exp(log_r1)
        x, fx = golden_max(lambda s: value(r1, math.exp(s)), lo2, hi2, cfg.refine_iters)
        return x, fx

    log_r1, best = golden_max(lambda s: inner(s)[1], lo1, hi1, cfg.refine_iters)
    log_r2, best = inner(log_r1)
    r1, r2 = math.exp(log_r1), math.exp(log_r2)
    grid_best = float(vals[i, j])
    if grid_best > best:
        best, r1, r2 = grid_best, float(grid[i]), float(grid[j])
    eps = 1e-6
    in_range = (1 - eps <= r1 <= (2 * a) * (1 + eps)) and (1 - eps <= r2 <= (2 * b) * (1 + eps))
    if not in_range:
        # the maximum can be attained on a whole set (flat objective on the
        # a = 1/2 or b = 1/2 edge); report a maximizer from the range if one exists
        c1, c2 = min(max(r1, 1.0), 2 * a), min(max(r2, 1.0), 2 * b)
        if value(c1, c2) >= best - 1e-12 * max(1.0, best):
            r1, r2, in_range = c1, c2, True
    return C1MaxSearch(best, r1, r2, in_range)


def brute_force_c1max(a: float, b: float, t: float, cfg: Optional[OracleConfig] = None) -> float:
    return search_c1max(a, b, t, cfg).c1_max


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, OracleConfig):
        seed = seed.seed
    return np.random.default_rng(seed)


def _local(rng, max_squeeze):
    def mode():
        th1, th2 = rng.uniform(0, 2 * math.pi, 2)
        z = math.exp(rng.uniform(-max_squeeze, max_squeeze))
        R1 = np.array([[math.cos(th1), -math.sin(th1)], [math.sin(th1), math.cos(th1)]])
        R2 = np.array([[math.cos(th2), -math.sin(th2)], [math.sin(th2), math.cos(th2)]])
        return R1 @ np.diag([z, 1 / z]) @ R2

    out = np.zeros((4, 4))
    out[:2, :2] = mode()
    out[2:, 2:] = mode()
    return out


def beam_splitter(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 0, s, 0], [0, c, 0, s], [-s, 0, c, 0], [0, -s, 0, c]])


def two_mode_squeezer(r: float) -> np.ndarray:
    ch, sh = math.cosh(r), math.sinh(r)
    return np.array([[ch, 0, sh, 0], [0, ch, 0, -sh], [sh, 0, ch, 0], [0, -sh, 0, ch]])


def williamson_covariance(nu1: float, nu2: float, symplectic=None) -> CovarianceMatrix:
    w = np.diag([nu1, nu1, nu2, nu2])
    S = np.eye(4) if symplectic is None else np.asarray(symplectic, dtype=float)
    return CovarianceMatrix(S @ w @ S.T)


def random_symplectic(seed, max_squeeze: float = 0.8) -> np.ndarray:
    rng = _rng(seed)
    nonlocal_ = beam_splitter(rng.uniform(0, 2 * math.pi)) @ two_mode_squeezer(
        rng.uniform(-max_squeeze, max_squeeze)
    )
    return _local(rng, max_squeeze) @ nonlocal_ @ _local(rng, max_squeeze)


def random_physical_covariance(
    seed: Union[int, OracleConfig, np.random.Generator] = 0, max_squeeze: float = 0.8
) -> CovarianceMatrix:
    """Random physical state: thermal Williamson form dressed by symplectics.

    Symplectic eigenvalues are log-uniform on ``[1/2, 4]``.
    """
    rng = _rng(seed)
    nu1, nu2 = np.exp(rng.uniform(math.log(0.5), math.log(4.0), 2))
    return williamson_covariance(nu1, nu2, random_symplectic(rng, max_squeeze))


@dataclass(frozen=True)
class ProbeResult:
    min_margin: float
    d: np.ndarray
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray


def probe_minimize_quadratic(
    v: CovarianceMatrix, sign: Optional[Sign] = Sign.MINUS, cfg: Optional[OracleConfig] = None
) -> ProbeResult:
    """Multi-start descent of the probe-vector margin over unit ``(d, f, g, h)``.

    The objective is the margin divided by the squared norm of the probe,
    minimized with BFGS from random starts plus the two EPR-type probes.
    """
    cfg = cfg or OracleConfig()
    rng = np.random.default_rng(cfg.seed)

    def fun(x):
        n2 = x @ x
        if n2 < 1e-300:
            return 0.0
        return quadratic_form_margin(v, x[0:2], x[2:4], x[4:6], x[6:8], sign) / n2

    starts = [np.array([1, 0, 1, 0, 0, 1, 0, -1.0]), np.array([1, 0, -1, 0, 0, 1, 0, 1.0])]
    starts += [rng.standard_normal(8) for _ in range(cfg.n_starts)]
    best_x, best_f = None, math.inf
    for x0 in starts:
        res = minimize(fun, x0, method="BFGS", options={"gtol": 1e-10})
        fx = fun(res.x)
        if fx < best_f:
            best_x, best_f = res.x, fx
    x = best_x / math.sqrt(best_x @ best_x)
    return ProbeResult(float(best_f), x[0:2], x[2:4], x[4:6], x[6:8])


@dataclass(frozen=True)
class Counterexample:
    v: CovarianceMatrix
    det_value: float
    min_eigenvalue: float
    c: float
    c_threshold: float


def det_vs_eig_counterexample(
    cfg: Optional[OracleConfig] = None,
    a: float = 1.0,
    b: float = 1.0,
    sign: Sign = Sign.PLUS,
    c_max: float = 100.0,
) -> Counterexample:
    """Find a standard form ``(a, b, c, c)`` where ``det(V + (i/2) diag(J, sign J))``
    is nonnegative although that matrix has negative eigenvalues.

    Scans ``c`` upward on a log grid, bisects the first place where the
    determinant turns from negative back to nonnegative, then certifies the
    first scanned point beyond it.
    """
    cfg = cfg or OracleConfig()

    def det_at(c):
        return ppt_det(StandardForm(a, b, c, c).covariance(), sign)

    cs = np.geomspace(0.01, c_max, cfg.grid_points * 10)
    dets = [det_at(c) for c in cs]
    for k in range(1, len(cs)):
        if dets[k - 1] < 0.0 <= dets[k]:
            lo, hi = float(cs[k - 1]), float(cs[k])
            for _ in range(cfg.refine_iters):
                mid = 0.5 * (lo + hi)
                if det_at(mid) < 0.0:
                    lo = mid
                else:
                    hi = mid
            for c in cs[k:]:
                v = StandardForm(a, b, float(c), float(c)).covariance()
                d = ppt_det(v, sign)
                m = psd_margin(uncertainty_matrix(v, sign))
                if d >= 0.0 and m.min_eigenvalue < -max(1e-6, cfg.tol * max(1.0, m.scale)):
                    return Counterexample(v, d, m.min_eigenvalue, float(c), hi)
    raise NotFoundError("no determinant/eigenvalue counterexample in the scanned range")


@dataclass(frozen=True)
class MonteCarloReport:
    max_deviation: float
    threshold: float
    max_sigma_ratio: float
    n: int

    @property
    def passed(self) -> bool:
        return self.max_sigma_ratio < 5.0


def mc_p_roundtrip(v: CovarianceMatrix, n: int = 10**6, seed: int = 0) -> MonteCarloReport:
    """Sample the P-function of ``v`` and compare the rebuilt covariance.

    Each entry's standard error is estimated from the samples themselves
    (``sqrt(var(x_i x_j) / n)`` of the centred products). ``threshold`` is five
    times the largest of them; the pass criterion is entrywise.
    """
    pf = build_p_function(v)
    x = sample_p_function(pf, n, seed)
    x = x - x.mean(axis=0)
    rebuilt = x.T @ x / (n - 1) + 0.5 * np.eye(4)
    se = np.empty((4, 4))
    for i in range(4):
        for j in range(i, 4):
            se[i, j] = se[j, i] = (x[:, i] * x[:, j]).std() / math.sqrt(n)
    dev = np.abs(rebuilt - v.v)
    ratio = dev / np.maximum(se, 1e-300)
    return MonteCarloReport(float(dev.max()), float(5 * se.max()), float(ratio.max()), n)


def physicality_sweep(n_seeds: int, start: int = 0) -> int:
    """Number of seeds in ``range(start, start + n_seeds)`` whose state is unphysical."""
    return sum(not is_physical(random_physical_covariance(s)).is_psd for s in range(start, start + n_seeds))
