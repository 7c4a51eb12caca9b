"""Separability criteria for two-mode Gaussian states.

Every criterion is exposed as a signed margin (``>= 0`` means the condition
holds); booleans are derived with the shared positivity tolerance.

``D`` below always denotes the polynomial
``a^2 b^2 (1 - t^2)^2 + t (a + b t)(a t + b)`` and enters the closed forms
through a single square root.
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import ContractError, DomainError
from .gaussian_state import (
    OMEGA,
    PT,
    CovarianceMatrix,
    J,
    SqueezeParams,
    StandardForm,
    apply_symplectic,
    is_physical,
    p_condition,
    partial_transpose,
    to_standard_form,
)
from .smallmat import TOL_PSD, PsdMargin, det4, psd_margin

DOMAIN_SLACK = 1e-9

_d_fault: contextvars.ContextVar[float] = contextvars.ContextVar("d_fault", default=0.0)


@contextlib.contextmanager
def inject_d_fault(delta: float = 0.01):
    """Test hook: add ``delta`` to every evaluation of ``d_polynomial``."""
    token = _d_fault.set(delta)
    try:
        yield
    finally:
        _d_fault.reset(token)


class Sign(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def factor(self) -> float:
        return 1.0 if self is Sign.PLUS else -1.0


class Verdict(str, enum.Enum):
    SEPARABLE = "Separable"
    ENTANGLED = "Entangled"
    UNPHYSICAL = "Unphysical"
    BOUNDARY = "Boundary"


def _check_abt(a: float, b: float, t: float) -> None:
    if not (a >= 0.5 - DOMAIN_SLACK and b >= 0.5 - DOMAIN_SLACK):
        raise ContractError(f"need a, b >= 1/2, got a={a!r}, b={b!r}")
    if not (0.0 <= t <= 1.0):
        raise ContractError(f"need 0 <= t <= 1, got t={t!r}")


def d_polynomial(a: float, b: float, t: float) -> float:
    _check_abt(a, b, t)
    return a * a * b * b * (1 - t * t) ** 2 + t * (a + b * t) * (a * t + b) + _d_fault.get()


@dataclass(frozen=True)
class BoundResult:
    """Largest separable ``|c1|`` for given ``(a, b, t)``.

    ``numerator`` is the bracket ``2ab(1+t^2) + t - 2 sqrt(D)`` as written;
    ``c1_max`` is evaluated from its rationalized form, which is free of the
    cancellation the bracket suffers for small ``t``.
    """

    c1_max: float
    sqrt_d: float
    numerator: float


def explicit_bound(a: float, b: float, t: float) -> BoundResult:
    sqrt_d = math.sqrt(max(0.0, d_polynomial(a, b, t)))
    x = 2 * a * b * (1 + t * t) + t
    numerator = x - 2 * sqrt_d
    # numerator == t^2 (4a^2-1)(4b^2-1) / (x + 2 sqrt_d) when D is exact
    excess = max(0.0, (4 * a * a - 1) * (4 * b * b - 1))
    c1_max = 0.5 * math.sqrt(excess / (x + 2 * sqrt_d))
    return BoundResult(c1_max, sqrt_d, numerator)


def explicit_bound_direct(a: float, b: float, t: float) -> float:
    """The bound evaluated term by term, with the t = 0 limit handled apart."""
    if t == 0.0:
        _check_abt(a, b, t)
        return math.sqrt(max(0.0, (4 * a * a - 1) * (4 * b * b - 1))) / (4 * math.sqrt(a * b))
    rad = 2 * a * b * (1 + t * t) + t - 2 * math.sqrt(d_polynomial(a, b, t))
    return math.sqrt(max(0.0, rad)) / (2 * t)


class BoundaryResiduals(NamedTuple):
    res22: float
    res23: float
    rel22: float
    rel23: float


def boundary_residuals(a: float, b: float, t: float, r1: float, r2: float) -> BoundaryResiduals:
    """Residuals of the two boundary equations fixing the optimal squeezing.

    The ratio equation is used cross-multiplied. Relative residuals divide
    by the size the products would have without cancellation (every factor
    ``x - y`` replaced by ``x + y``), which stays meaningful when both sides
    vanish, e.g. at ``a = 1/2``.
    """
    tt = t * t
    if not tt > 0.0:
        raise DomainError("the first boundary equation needs t > 0")
    if r1 <= 0 or r2 <= 0:
        raise ContractError("squeeze parameters must be positive")
    lhs22 = (a - 0.5 / r1) * (b - 0.5 / r2)
    rhs22 = (a - 0.5 * r1) * (b - 0.5 * r2)
    lhs23 = (a * r1 - 0.5) * (b / r2 - 0.5)
    rhs23 = (b * r2 - 0.5) * (a / r1 - 0.5)
    res23 = lhs23 - rhs23
    cross22 = tt * lhs22 - rhs22
    scale22 = tt * (a + 0.5 / r1) * (b + 0.5 / r2) + (a + 0.5 * r1) * (b + 0.5 * r2)
    scale23 = (a * r1 + 0.5) * (b / r2 + 0.5) + (b * r2 + 0.5) * (a / r1 + 0.5)
    return BoundaryResiduals(cross22 / tt, res23, abs(cross22) / scale22, abs(res23) / scale23)


@dataclass(frozen=True)
class OptimalSqueeze:
    r1: float
    r2: float
    residual_22: Optional[float]
    residual_23: Optional[float]

    def params(self) -> SqueezeParams:
        return SqueezeParams(self.r1, self.r2)


def _offset(x: float, y: float, s: float, t: float) -> float:
    """``x * top - w / 2`` with ``top = xy(1 - t^2) + s`` and ``w = y + xt``.

    Rationalized as ``(4x^2 - 1) w^2 / (4 (x s + u))``,
    ``u = w/2 - x^2 y (1 - t^2)``, whenever that has no cancellation.
    """
    w = y + x * t
    u = 0.5 * w - x * x * y * (1 - t * t)
    if u <= 0.0:
        return x * s - u
    return (4 * x * x - 1) * w * w / (4 * (x * s + u))


def optimal_squeezing(a: float, b: float, t: float) -> OptimalSqueeze:
    """Squeezing ``(r1, r2)`` that maximizes the P-representable ``|c1|``.

    ``r1 = (ab(1-t^2) + sqrt(D)) / (at + b)``, ``r2`` likewise over
    ``(a + bt)``. Both are evaluated as ``1/(2a) + offset`` so that the
    factor ``a r1 - 1/2`` vanishes exactly when ``a = 1/2``.
    """
    sqrt_d = math.sqrt(max(0.0, d_polynomial(a, b, t)))
    r1 = 0.5 / a + _offset(a, b, sqrt_d, t) / (a * (a * t + b))
    r2 = 0.5 / b + _offset(b, a, sqrt_d, t) / (b * (a + b * t))
    if t * t > 0.0:
        res = boundary_residuals(a, b, t, r1, r2)
        return OptimalSqueeze(r1, r2, res.rel22, res.rel23)
    return OptimalSqueeze(r1, r2, None, None)


def _clamped_sqrt(x: float):
    return (math.sqrt(x), False) if x >= 0.0 else (0.0, True)


def _factor(x: float):
    return (x, False) if x >= 0.0 else (0.0, True)


class BoundExpressions(NamedTuple):
    expr_q: float
    expr_p: float
    clamped: bool


def p_rep_bound_expressions(a: float, b: float, t: float, r1: float, r2: float) -> BoundExpressions:
    """Ceilings on ``|c1|`` from the position and momentum blocks of ``V - I/2``
    after squeezing the standard form by ``(r1, r2)``.

    At ``t == 0`` the momentum block imposes nothing (``expr_p = inf``)
    unless one of its diagonal entries is negative.
    """
    fq1, k1 = _factor(a * r1 - 0.5)
    fq2, k2 = _factor(b * r2 - 0.5)
    fp1, k3 = _factor(a / r1 - 0.5)
    fp2, k4 = _factor(b / r2 - 0.5)
    clamped = k1 or k2 or k3 or k4
    rr = math.sqrt(r1 * r2)
    expr_q = math.sqrt(fq1 * fq2) / rr
    if t > 0.0:
        expr_p = math.sqrt(fp1 * fp2) * rr / t
    else:
        expr_p = 0.0 if (k3 or k4) else math.inf
    return BoundExpressions(expr_q, expr_p, clamped)


def simon_det_criterion(sf: StandardForm) -> float:
    a, b, c1, c2 = sf.a, sf.b, sf.c1, sf.c2
    return 4 * (a * b - c1 * c1) * (a * b - c2 * c2) - ((a * a + b * b) + 2 * abs(c1 * c2) - 0.25)


def uncertainty_matrix(v: CovarianceMatrix, sign: Sign) -> np.ndarray:
    """``V + (i/2) diag(J, sign J)``."""
    omega = OMEGA.copy()
    omega[2:, 2:] *= Sign(sign).factor
    return v.v + 0.5j * omega


def ppt_det(v: CovarianceMatrix, sign: Sign) -> float:
    return det4(uncertainty_matrix(v, sign))


def ppt_full(v: CovarianceMatrix, tol: float = TOL_PSD) -> PsdMargin:
    return is_physical(partial_transpose(v), tol)


def quadratic_form_margin(v: CovarianceMatrix, d, f, g, h, sign: Optional[Sign] = None) -> float:
    """Expectation-value form of the positivity condition for probe vectors.

    With ``sign=None`` the two symplectic terms enter as absolute values,
    covering both signs at once. With a sign, the value is exactly
    ``w^dagger M w`` for ``w = (d + i g, f + i h)`` and
    ``M = V + (i/2) diag(J, sign J)``.
    """
    d, f, g, h = (np.asarray(x, dtype=float) for x in (d, f, g, h))
    A, B, C = v.A, v.B, v.C
    quad = d @ A @ d + f @ B @ f + 2 * d @ C @ f + g @ A @ g + h @ B @ h + 2 * g @ C @ h
    x, y = d @ J @ g, f @ J @ h
    if sign is None:
        return float(quad - abs(x) - abs(y))
    return float(quad - x - Sign(sign).factor * y)


def weaker_condition_margin(v: CovarianceMatrix, d, f, sign: Sign) -> float:
    """Probe margin after tying ``g = J^T d`` and ``h = +-J^T f``."""
    d, f = np.asarray(d, dtype=float), np.asarray(f, dtype=float)
    A, B, C = v.A, v.B, v.C
    s = Sign(sign).factor
    lhs = (
        d @ A @ d
        + f @ B @ f
        + 2 * d @ C @ f
        + d @ J @ A @ J.T @ d
        + f @ J @ B @ J.T @ f
        + s * 2 * d @ J @ C @ J.T @ f
    )
    return float(lhs - (d @ d + f @ f))


def dgcz_standard_bound(a: float, b: float, t: float) -> float:
    """Largest ``|c1|`` allowed by the unsqueezed EPR-variance condition."""
    _check_abt(a, b, t)
    return math.sqrt(max(0.0, (2 * a - 1) * (2 * b - 1))) / (1 + t)


def dgcz_standard_margin(sf: StandardForm) -> float:
    if sf.a < 0.5 - DOMAIN_SLACK or sf.b < 0.5 - DOMAIN_SLACK:
        raise DomainError(f"need a, b >= 1/2, got a={sf.a!r}, b={sf.b!r}")
    return math.sqrt(max(0.0, (2 * sf.a - 1) * (2 * sf.b - 1))) - (abs(sf.c1) + abs(sf.c2))


class RadicalMargin(NamedTuple):
    value: float
    clamped: bool


def _dgcz_terms(sf: StandardForm, r1: float, r2: float):
    if r1 <= 0 or r2 <= 0:
        raise ContractError("squeeze parameters must be positive")
    a, b = sf.a, sf.b
    q, k1 = _clamped_sqrt((a * r1 - 0.5) * (b * r2 - 0.5))
    p, k2 = _clamped_sqrt((a / r1 - 0.5) * (b / r2 - 0.5))
    rr = math.sqrt(r1 * r2)
    return q, p, rr * abs(sf.c1), abs(sf.c2) / rr, k1 or k2


def dgcz_squeezed_margin(sf: StandardForm, r1: float, r2: float) -> RadicalMargin:
    q, p, cq, cp, clamped = _dgcz_terms(sf, r1, r2)
    return RadicalMargin(q + p - (cq + cp), clamped)


def dgcz_extra_residual(sf: StandardForm, r1: float, r2: float) -> RadicalMargin:
    q, p, cq, cp, clamped = _dgcz_terms(sf, r1, r2)
    return RadicalMargin((q - cq) - (p - cp), clamped)


@dataclass(frozen=True)
class SeparabilityReport:
    physical: PsdMargin
    verdict: Verdict
    ppt_full: Optional[PsdMargin] = None
    standard_form: Optional[StandardForm] = None
    simon_det_margin: Optional[float] = None
    explicit_bound: Optional[BoundResult] = None
    explicit_margin: Optional[float] = None
    dgcz16_margin: Optional[float] = None
    dgcz26_margin: Optional[float] = None
    optimal_squeeze: Optional[OptimalSqueeze] = None
    p_rep_after_optimal_squeeze: Optional[PsdMargin] = None
    tol: float = TOL_PSD
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def margin(m):
            return None if m is None else m.to_dict()

        out = {
            "verdict": self.verdict.value,
            "tol": self.tol,
            "physical": margin(self.physical),
            "ppt_full": margin(self.ppt_full),
            "standard_form": None if self.standard_form is None else self.standard_form.to_dict(),
            "simon_det_margin": self.simon_det_margin,
            "explicit_bound": None,
            "explicit_margin": self.explicit_margin,
            "dgcz16_margin": self.dgcz16_margin,
            "dgcz26_margin": self.dgcz26_margin,
            "optimal_squeeze": None,
            "p_rep_after_optimal_squeeze": margin(self.p_rep_after_optimal_squeeze),
            "notes": list(self.notes),
        }
        if self.explicit_bound is not None:
            eb = self.explicit_bound
            out["explicit_bound"] = {"c1_max": eb.c1_max, "sqrt_d": eb.sqrt_d, "numerator": eb.numerator}
        if self.optimal_squeeze is not None:
            os_ = self.optimal_squeeze
            out["optimal_squeeze"] = {
                "r1": os_.r1,
                "r2": os_.r2,
                "residual_22": os_.residual_22,
                "residual_23": os_.residual_23,
            }
        return out


def separability_verdict(v: CovarianceMatrix, tol: float = TOL_PSD) -> SeparabilityReport:
    phys = is_physical(v, tol)
    if not phys.is_psd:
        return SeparabilityReport(physical=phys, verdict=Verdict.UNPHYSICAL, tol=tol)

    ppt = ppt_full(v, tol)
    sf, _ = to_standard_form(v, tol)
    a, b = max(sf.a, 0.5), max(sf.b, 0.5)
    t = sf.t if sf.t is not None else 0.0
    notes = []
    if sf.t is None:
        notes.append("c1 = c2 = 0: product standard form, separable iff physical")
    bound = explicit_bound(a, b, t)
    opt = optimal_squeezing(a, b, t)
    squeezed = apply_symplectic(sf.covariance(), opt.params().symplectic())
    prep = p_condition(squeezed, tol)
    dg26 = dgcz_squeezed_margin(sf, opt.r1, opt.r2)
    if dg26.clamped:
        notes.append("dgcz26 radicand clamped at 0")

    if ppt.on_boundary():
        verdict = Verdict.BOUNDARY
    elif ppt.is_psd:
        verdict = Verdict.SEPARABLE
    else:
        verdict = Verdict.ENTANGLED

    explicit_margin = bound.c1_max - abs(sf.c1)
    band = 1e-8 * max(1.0, a, b)
    if abs(explicit_margin) > band and verdict is not Verdict.BOUNDARY:
        if (explicit_margin > 0) != ppt.is_psd:
            notes.append("explicit-bound verdict disagrees with the PPT eigenvalue check")
        if not prep.on_boundary() and prep.is_psd != ppt.is_psd:
            notes.append("optimal-squeeze P-condition disagrees with the PPT eigenvalue check")

    return SeparabilityReport(
        physical=phys,
        verdict=verdict,
        ppt_full=ppt,
        standard_form=sf,
        simon_det_margin=simon_det_criterion(sf),
        explicit_bound=bound,
        explicit_margin=explicit_margin,
        dgcz16_margin=dgcz_standard_margin(sf),
        dgcz26_margin=dg26.value,
        optimal_squeeze=opt,
        p_rep_after_optimal_squeeze=prep,
        tol=tol,
        notes=notes,
    )


__all__ = [
    "PT",
    "Sign",
    "Verdict",
    "BoundResult",
    "OptimalSqueeze",
    "SeparabilityReport",
    "inject_d_fault",
    "d_polynomial",
    "explicit_bound",
    "explicit_bound_direct",
    "optimal_squeezing",
    "boundary_residuals",
    "p_rep_bound_expressions",
    "simon_det_criterion",
    "ppt_det",
    "uncertainty_matrix",
    "ppt_full",
    "quadratic_form_margin",
    "weaker_condition_margin",
    "dgcz_standard_bound",
    "dgcz_standard_margin",
    "dgcz_squeezed_margin",
    "dgcz_extra_residual",
    "separability_verdict",
    "psd_margin",
]
