"""Two-mode Gaussian covariance matrices.

Variables are ordered ``(q1, p1, q2, p2)`` and the vacuum has variance 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractError, DomainError, RepresentationError
from .smallmat import TOL_PSD, PsdMargin, as_sym4, det4, inv4, psd_margin

ORDERING = "q1 p1 q2 p2"
TOL_STRICT = 1e-8

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.block([[J, np.zeros((2, 2))], [np.zeros((2, 2)), J]])
PT = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Symmetric 4x4 second-moment matrix with block views ``A``, ``B``, ``C``."""

    v: np.ndarray

    def __post_init__(self):
        arr = as_sym4(self.v)
        arr.setflags(write=False)
        object.__setattr__(self, "v", arr)

    @property
    def A(self) -> np.ndarray:
        return self.v[:2, :2]

    @property
    def B(self) -> np.ndarray:
        return self.v[2:, 2:]

    @property
    def C(self) -> np.ndarray:
        return self.v[:2, 2:]

    @classmethod
    def from_blocks(cls, A, B, C) -> CovarianceMatrix:
        C = np.asarray(C, dtype=float)
        return cls(np.block([[np.asarray(A, float), C], [C.T, np.asarray(B, float)]]))

    @classmethod
    def vacuum(cls) -> CovarianceMatrix:
        return cls(0.5 * np.eye(4))

    @classmethod
    def two_mode_squeezed_vacuum(cls, r: float) -> CovarianceMatrix:
        ch, sh = math.cosh(2 * r) / 2, math.sinh(2 * r) / 2
        return cls.from_blocks(ch * np.eye(2), ch * np.eye(2), np.diag([sh, -sh]))

    def to_json_dict(self) -> dict:
        return {"ordering": ORDERING, "v": self.v.tolist()}

    @classmethod
    def from_json_dict(cls, data: dict) -> CovarianceMatrix:
        if "v" not in data:
            raise ContractError("covariance object needs a 'v' entry")
        ordering = data.get("ordering", ORDERING)
        if " ".join(str(ordering).split()) != ORDERING:
            raise ContractError(f"unsupported ordering {ordering!r}; expected {ORDERING!r}")
        rows = data["v"]
        if not isinstance(rows, list) or len(rows) != 4 or any(
            not isinstance(r, list) or len(r) != 4 for r in rows
        ):
            raise ContractError("'v' must be a list of 4 rows of 4 numbers")
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise ContractError(f"entry v[{i}][{j}]={x!r} is not a number")
        return cls(np.array(rows, dtype=float))

    def __repr__(self):
        return f"CovarianceMatrix({self.v.tolist()!r})"


@dataclass(frozen=True)
class StandardForm:
    """Parameters of the standard form ``[[a,0,c1,0],[0,a,0,c2],[c1,0,b,0],[0,c2,0,b]]``."""

    a: float
    b: float
    c1: float
    c2: float

    @property
    def t(self) -> Optional[float]:
        """``|c2/c1|``; ``None`` when ``c1 == 0``."""
        if self.c1 == 0.0:
            return None
        return abs(self.c2 / self.c1)

    def is_canonical(self) -> bool:
        return self.c1 >= abs(self.c2)

    def canonical(self) -> StandardForm:
        """Relabel by local quarter/half rotations so that ``c1 >= |c2|``."""
        c1, c2 = self.c1, self.c2
        if abs(c2) > abs(c1):
            c1, c2 = c2, c1
        if c1 < 0:
            c1, c2 = -c1, -c2
        return StandardForm(self.a, self.b, c1 + 0.0, c2 + 0.0)

    def covariance(self) -> CovarianceMatrix:
        a, b, c1, c2 = self.a, self.b, self.c1, self.c2
        return CovarianceMatrix(
            [[a, 0, c1, 0], [0, a, 0, c2], [c1, 0, b, 0], [0, c2, 0, b]]
        )

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c1": self.c1, "c2": self.c2}

    @classmethod
    def from_dict(cls, data: dict) -> StandardForm:
        vals = []
        for key in ("a", "b", "c1", "c2"):
            x = data.get(key)
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ContractError(f"standard-form field {key!r} missing or not a number")
            vals.append(float(x))
        return cls(*vals)


def _det2(m) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def rotation2(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def squeeze2(r: float) -> np.ndarray:
    """``diag(sqrt(r), 1/sqrt(r))``."""
    return np.diag([math.sqrt(r), 1.0 / math.sqrt(r)])


@dataclass(frozen=True, eq=False)
class LocalSymplectic:
    """A pair of unit-determinant 2x2 maps, one per mode."""

    s1: np.ndarray
    s2: np.ndarray

    def __post_init__(self):
        for name in ("s1", "s2"):
            m = np.array(getattr(self, name), dtype=float)
            if m.shape != (2, 2) or not np.all(np.isfinite(m)):
                raise ContractError(f"{name} must be a finite 2x2 matrix")
            if abs(_det2(m) - 1.0) > 1e-10:
                raise ContractError(f"{name} has determinant {_det2(m)!r}, expected 1")
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @classmethod
    def identity(cls) -> LocalSymplectic:
        return cls(np.eye(2), np.eye(2))

    @classmethod
    def rotation(cls, theta1: float, theta2: float) -> LocalSymplectic:
        return cls(rotation2(theta1), rotation2(theta2))

    @property
    def matrix(self) -> np.ndarray:
        out = np.zeros((4, 4))
        out[:2, :2] = self.s1
        out[2:, 2:] = self.s2
        return out

    def inverse(self) -> LocalSymplectic:
        def inv2(m):
            return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])

        return LocalSymplectic(inv2(self.s1), inv2(self.s2))

    def __matmul__(self, other: LocalSymplectic) -> LocalSymplectic:
        return LocalSymplectic(self.s1 @ other.s1, self.s2 @ other.s2)


@dataclass(frozen=True)
class SqueezeParams:
    r1: float
    r2: float

    def __post_init__(self):
        if not (self.r1 > 0 and self.r2 > 0):
            raise ContractError(f"squeeze parameters must be positive, got ({self.r1}, {self.r2})")

    def symplectic(self) -> LocalSymplectic:
        return LocalSymplectic(squeeze2(self.r1), squeeze2(self.r2))


@dataclass(frozen=True, eq=False)
class GaussianPFunction:
    """Gaussian weight ``sqrt(det P)/(4 pi^2) exp(-x.P.x/2)`` over coherent amplitudes."""

    precision: np.ndarray
    mean: np.ndarray
    norm_factor: float

    def density(self, x) -> float:
        x = np.asarray(x, dtype=float) - self.mean
        return float(self.norm_factor * math.exp(-0.5 * x @ self.precision @ x))


def is_physical(v: CovarianceMatrix, tol: float = TOL_PSD) -> PsdMargin:
    """Uncertainty relation ``V + (i/2) diag(J, J) >= 0``."""
    return psd_margin(v.v + 0.5j * OMEGA, tol)


def partial_transpose(v: CovarianceMatrix) -> CovarianceMatrix:
    """Momentum reversal of mode 2."""
    out = v.v * np.outer(np.diag(PT), np.diag(PT))
    return CovarianceMatrix(out)


def apply_symplectic(v: CovarianceMatrix, s: LocalSymplectic) -> CovarianceMatrix:
    S = s.matrix
    return CovarianceMatrix(S @ v.v @ S.T)


def _balance(block: np.ndarray) -> np.ndarray:
    """Symplectic ``Z R^T`` sending a 2x2 positive block to ``sqrt(det) * I``."""
    theta = 0.5 * math.atan2(2.0 * block[0, 1], block[0, 0] - block[1, 1])
    R = rotation2(theta)
    d = R.T @ block @ R
    l1, l2 = d[0, 0], d[1, 1]
    z = (l2 / l1) ** 0.25
    return np.diag([z, 1.0 / z]) @ R.T


def _proper_rotation(u: np.ndarray):
    """Turn an orthogonal 2x2 into a rotation by flipping its second column."""
    if _det2(u) < 0:
        u = u.copy()
        u[:, 1] *= -1.0
        return u, -1.0
    return u, 1.0


def to_standard_form(v: CovarianceMatrix, tol: float = TOL_PSD):
    """Reduce ``v`` by local symplectics.

    Returns ``(sf, s)`` with ``apply_symplectic(v, s)`` equal to
    ``sf.covariance()`` and ``sf`` in canonical orientation ``c1 >= |c2|``.
    """
    margin = is_physical(v, tol)
    if not margin.is_psd:
        raise DomainError("covariance matrix is not physical", margin=margin)
    if min(_det2(v.A), _det2(v.B)) <= 0.0 or v.A[0, 0] <= 0.0 or v.B[0, 0] <= 0.0:
        raise DomainError("local blocks are not positive definite", margin=margin)

    t1 = _balance(v.A)
    t2 = _balance(v.B)
    c = t1 @ v.C @ t2.T
    u, sig, wt = np.linalg.svd(c)
    u, f1 = _proper_rotation(u)
    w, f2 = _proper_rotation(wt.T)
    s1 = u.T @ t1
    s2 = w.T @ t2
    # x >= 0 by construction; flips move the sign of det C onto c2.
    x, y = float(sig[0]), float(sig[1]) * f1 * f2
    s = LocalSymplectic(s1, s2)
    out = apply_symplectic(v, s).v
    a = 0.5 * (out[0, 0] + out[1, 1])
    b = 0.5 * (out[2, 2] + out[3, 3])
    return StandardForm(a, b, x, y), s


def p_condition(v: CovarianceMatrix, tol: float = TOL_PSD) -> PsdMargin:
    """P-representability ``V - I/2 >= 0``."""
    return psd_margin(v.v - 0.5 * np.eye(4), tol)


def build_p_function(v: CovarianceMatrix, tol_strict: float = TOL_STRICT) -> GaussianPFunction:
    margin = p_condition(v)
    if margin.min_eigenvalue < tol_strict:
        raise RepresentationError(
            f"V - I/2 is not strictly positive (min eigenvalue {margin.min_eigenvalue!r})",
            margin=margin,
        )
    precision = as_sym4(inv4(v.v - 0.5 * np.eye(4)))
    norm = math.sqrt(det4(precision)) / (4 * math.pi**2)
    return GaussianPFunction(precision, np.zeros(4), norm)


def sample_p_function(pf: GaussianPFunction, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` coherent amplitudes ``(n, 4)`` from the P-function weight."""
    cov = inv4(pf.precision)
    L = np.linalg.cholesky(0.5 * (cov + cov.T))
    z = np.random.default_rng(seed).standard_normal((n, 4))
    return pf.mean + z @ L.T


def p_function_moments(pf: GaussianPFunction, n: int, seed: int) -> CovarianceMatrix:
    """Covariance of the coherent-state mixture estimated from ``n`` samples."""
    if n < 1000:
        raise ContractError("need at least 1000 samples")
    x = sample_p_function(pf, n, seed)
    return CovarianceMatrix(np.cov(x, rowvar=False) + 0.5 * np.eye(4))
