"""Dense kernels for 4x4 real-symmetric and complex-Hermitian matrices.

Eigenvalues come from a cyclic Jacobi iteration written for the 4x4 case.
Matrices are plain ``numpy`` arrays; the ``as_*`` constructors validate and
symmetrize them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NumericalError, SingularMatrixError

TOL_PSD = 1e-10
TOL_SYM = 1e-12
TOL_SINGULAR = 1e-12
MAX_SWEEPS = 100

__all__ = [
    "TOL_PSD",
    "PsdMargin",
    "as_mat4",
    "as_sym4",
    "as_herm4",
    "sym_eigenvalues",
    "herm_eigenvalues",
    "herm_eigh",
    "det4",
    "inv4",
    "psd_margin",
]


def as_mat4(m) -> np.ndarray:
    """Return ``m`` as a finite 4x4 float array."""
    arr = np.asarray(m, dtype=float)
    if arr.shape != (4, 4):
        raise ContractError(f"expected a 4x4 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError("matrix contains NaN or infinite entries")
    return arr.copy()


def as_sym4(m) -> np.ndarray:
    """Validate symmetry within ``TOL_SYM`` (relative) and symmetrize."""
    arr = as_mat4(m)
    scale = 1.0 + np.max(np.abs(arr))
    dev = np.abs(arr - arr.T)
    if np.max(dev) > TOL_SYM * scale:
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        raise ContractError(
            f"matrix is not symmetric: entry [{i}][{j}]={float(arr[i, j])!r} "
            f"differs from [{j}][{i}]={float(arr[j, i])!r}"
        )
    return 0.5 * (arr + arr.T)


def as_herm4(m) -> np.ndarray:
    """Validate the Hermitian property within ``TOL_SYM`` and symmetrize."""
    arr = np.asarray(m, dtype=complex)
    if arr.shape != (4, 4):
        raise ContractError(f"expected a 4x4 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError("matrix contains NaN or infinite entries")
    scale = 1.0 + np.max(np.abs(arr))
    if np.max(np.abs(arr - arr.conj().T)) > TOL_SYM * scale:
        raise ContractError("matrix is not Hermitian")
    return 0.5 * (arr + arr.conj().T)


def _jacobi(rows, max_sweeps=MAX_SWEEPS):
    """Cyclic complex Jacobi on a Hermitian matrix given as nested lists.

    Returns ``(eigenvalues, U)`` with ``H = U diag(w) U^dagger``, unsorted.
    """
    n = len(rows)
    a = [[complex(x) for x in row] for row in rows]
    u = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    scale = max(abs(x) for row in a for x in row)
    if scale == 0.0:
        return [0.0] * n, u
    thresh = (1e-15 * scale) ** 2
    for _ in range(max_sweeps):
        off = sum(abs(a[p][q]) ** 2 for p in range(n) for q in range(p + 1, n))
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p][q]
                ag = abs(g)
                if ag <= 1e-300:
                    continue
                phase = (g / ag).conjugate()
                tau = (a[q][q].real - a[p][p].real) / (2.0 * ag)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                upp, upq, uqp, uqq = c, s, -s * phase, c * phase
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = akp * upp + akq * uqp
                    a[k][q] = akp * upq + akq * uqq
                    ukp, ukq = u[k][p], u[k][q]
                    u[k][p] = ukp * upp + ukq * uqp
                    u[k][q] = ukp * upq + ukq * uqq
                cpp, cpq, cqp, cqq = upp, upq, uqp.conjugate(), uqq.conjugate()
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = cpp * apk + cqp * aqk
                    a[q][k] = cpq * apk + cqq * aqk
                a[p][q] = a[q][p] = 0j
                a[p][p] = complex(a[p][p].real)
                a[q][q] = complex(a[q][q].real)
    else:
        off = sum(abs(a[p][q]) ** 2 for p in range(n) for q in range(p + 1, n))
        if off > thresh:
            raise NumericalError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps",
                residual=math.sqrt(off),
            )
    return [a[i][i].real for i in range(n)], u


def _eigh_checked(m: np.ndarray):
    w, u = _jacobi(m.tolist())
    u = np.array(u, dtype=complex)
    w = np.array(w)
    order = np.argsort(w, kind="stable")
    w, u = w[order], u[:, order]
    recon = (u * w) @ u.conj().T
    residual = float(np.max(np.abs(recon - m)))
    if residual > 1e-10 * (1.0 + float(np.max(np.abs(m)))):
        raise NumericalError("spectral reconstruction residual too large", residual=residual)
    return w, u


def sym_eigenvalues(m) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric 4x4 matrix."""
    return _eigh_checked(as_sym4(m))[0]


def herm_eigh(m):
    """Ascending eigenvalues and unitary eigenvectors (columns) of a Hermitian 4x4."""
    return _eigh_checked(as_herm4(m))


def herm_eigenvalues(m) -> np.ndarray:
    return herm_eigh(m)[0]


def _cofactor_det(m: np.ndarray):
    """Laplace expansion along the first row; no pivots, so no overflow on tiny entries."""
    if m.shape[0] == 1:
        return m[0, 0]
    total = 0
    for j in range(m.shape[0]):
        if m[0, j] != 0:
            minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
            total += (-1) ** j * m[0, j] * _cofactor_det(minor)
    return total


def _det(arr: np.ndarray):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        d = np.linalg.det(arr)
    # LU can divide by a subnormal pivot; the expansion has no division at all
    return d if np.isfinite(d) else _cofactor_det(arr)


def det4(m) -> float:
    """Determinant of a 4x4 real or Hermitian matrix, as a real number."""
    arr = np.asarray(m)
    if np.iscomplexobj(arr):
        arr = as_herm4(arr)
        d = complex(_det(arr))
        bound = 1e-10 * (1.0 + float(np.max(np.abs(arr))) ** 4)
        if abs(d.imag) > bound:
            raise NumericalError("Hermitian determinant has a large imaginary part", residual=abs(d.imag))
        return float(d.real)
    return float(_det(as_mat4(arr)))


def inv4(m) -> np.ndarray:
    arr = as_mat4(m)
    d = det4(arr)
    if abs(d) <= TOL_SINGULAR * (1.0 + float(np.max(np.abs(arr))) ** 4):
        raise SingularMatrixError(f"matrix is numerically singular (det={d!r})", det=d)
    inv = np.linalg.inv(arr)
    if np.max(np.abs(arr @ inv - np.eye(4))) > 1e-9:
        raise NumericalError("inverse failed the identity check")
    return inv


@dataclass(frozen=True)
class PsdMargin:
    """Signed positivity margin of a Hermitian matrix.

    ``is_psd`` holds when the smallest eigenvalue is above
    ``-tol * max(1, scale)``, ``scale`` being the largest absolute eigenvalue.
    """

    min_eigenvalue: float
    scale: float
    is_psd: bool
    tol: float = TOL_PSD

    @classmethod
    def from_eigenvalues(cls, w, tol: float = TOL_PSD) -> PsdMargin:
        lo = float(np.min(w))
        scale = float(np.max(np.abs(w)))
        return cls(lo, scale, lo >= -tol * max(1.0, scale), tol)

    def on_boundary(self) -> bool:
        return abs(self.min_eigenvalue) <= self.tol * max(1.0, self.scale)

    def to_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "scale": self.scale,
            "is_psd": self.is_psd,
            "tol": self.tol,
        }


def psd_margin(m, tol: float = TOL_PSD) -> PsdMargin:
    arr = np.asarray(m)
    w = herm_eigenvalues(arr) if np.iscomplexobj(arr) else sym_eigenvalues(arr)
    return PsdMargin.from_eigenvalues(w, tol)
