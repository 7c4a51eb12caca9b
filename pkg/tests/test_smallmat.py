import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gauss_sep.errors import ContractError, SingularMatrixError
from gauss_sep.smallmat import (
    det4,
    herm_eigenvalues,
    herm_eigh,
    inv4,
    psd_margin,
    sym_eigenvalues,
)

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.block([[J, np.zeros((2, 2))], [np.zeros((2, 2)), J]])

entries = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def sym(x):
    return x + x.T


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.eye(4), [1, 1, 1, 1]),
        (np.diag([1.0, 2, 3, 4]), [1, 2, 3, 4]),
        (np.diag([4.0, 2, 3, 1]), [1, 2, 3, 4]),
        (np.ones((4, 4)), [0, 0, 0, 4]),
    ],
)
def test_sym_eigenvalues_examples(m, expected):
    np.testing.assert_allclose(sym_eigenvalues(m), expected, atol=1e-13)


def test_herm_eigenvalues_examples():
    np.testing.assert_allclose(herm_eigenvalues(np.eye(4, dtype=complex)), [1, 1, 1, 1])
    np.testing.assert_allclose(herm_eigenvalues(0.5j * OMEGA), [-0.5, -0.5, 0.5, 0.5], atol=1e-14)
    np.testing.assert_allclose(herm_eigenvalues(0.5 * np.eye(4) + 0.5j * OMEGA), [0, 0, 1, 1], atol=1e-14)


def test_non_symmetric_rejected():
    m = np.eye(4)
    m[0, 1] = 1.0
    with pytest.raises(ContractError, match=r"\[0\]\[1\]|\[1\]\[0\]"):
        sym_eigenvalues(m)
    with pytest.raises(ContractError):
        herm_eigenvalues(np.eye(4) + 1j * np.eye(4))
    with pytest.raises(ContractError):
        sym_eigenvalues(np.eye(3))
    bad = np.eye(4)
    bad[2, 2] = np.nan
    with pytest.raises(ContractError):
        sym_eigenvalues(bad)


def test_det4_examples():
    assert det4(np.eye(4)) == pytest.approx(1.0)
    assert det4(np.diag([2.0, 3, 4, 5])) == pytest.approx(120.0)
    m = np.diag([1.0, 2, 3, 4])
    m[3, :] = 0.0
    assert det4(m) == 0.0
    assert det4(0.5 * np.eye(4) + 0.5j * OMEGA) == pytest.approx(0.0, abs=1e-15)


def test_inv4_examples():
    np.testing.assert_allclose(inv4(np.eye(4)), np.eye(4))
    np.testing.assert_allclose(inv4(2 * np.eye(4)), 0.5 * np.eye(4))
    np.testing.assert_allclose(inv4(np.eye(4) - 0.5 * np.eye(4)), 2 * np.eye(4))
    with pytest.raises(SingularMatrixError) as info:
        inv4(np.diag([1.0, 1.0, 1.0, 0.0]))
    assert info.value.det == 0.0


def test_psd_margin_tolerance_band():
    m = psd_margin(np.eye(4))
    assert m.min_eigenvalue == pytest.approx(1.0) and m.is_psd
    assert not psd_margin(np.diag([1, 1, 1, -1e-3])).is_psd
    assert psd_margin(np.diag([1, 1, 1, -1e-14])).is_psd
    assert not psd_margin(np.diag([1, 1, 1, -1e-14]), tol=1e-16).is_psd


@given(arrays(float, (4, 4), elements=entries))
def test_trace_and_det_identities(x):
    m = sym(x)
    w = sym_eigenvalues(m)
    scale = 1 + np.max(np.abs(m))
    assert np.all(np.diff(w) >= 0)
    assert abs(w.sum() - np.trace(m)) <= 1e-9 * scale
    d = det4(m)
    # relative, with an absolute floor for nearly singular draws
    assert abs(np.prod(w) - d) <= 1e-8 * abs(d) + 1e-12 * scale**4


@given(arrays(float, (4, 4), elements=entries), arrays(float, (4, 4), elements=entries))
def test_hermitian_eigen_against_numpy(x, y):
    h = sym(x) + 1j * (y - y.T)
    w, u = herm_eigh(h)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(h), atol=1e-10 * (1 + np.max(np.abs(h))))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


@given(arrays(float, (4, 4), elements=entries))
def test_real_matrix_as_hermitian(x):
    m = sym(x)
    np.testing.assert_allclose(herm_eigenvalues(m.astype(complex)), sym_eigenvalues(m), atol=1e-10)


@given(arrays(float, (4, 4), elements=st.floats(-1, 1)), st.permutations(range(4)))
def test_inverse_round_trip_and_permutation_invariance(x, perm):
    m = x @ x.T + np.eye(4)
    np.testing.assert_allclose(inv4(inv4(m)), m, atol=1e-8)
    np.testing.assert_allclose(m @ inv4(m), np.eye(4), atol=1e-9)
    p = np.eye(4)[list(perm)]
    a, b = psd_margin(m), psd_margin(p @ m @ p.T)
    assert a.is_psd == b.is_psd
    assert a.min_eigenvalue == pytest.approx(b.min_eigenvalue, abs=1e-12)


def test_det_survives_subnormal_pivot():
    m = np.diag([0.5, 0.5, 1.0, 1.0]).astype(complex)
    m[0, 1], m[1, 0] = 0.5j, -0.5j
    m[2, 3], m[3, 2] = -0.5j, 0.5j
    m[0, 2] = m[2, 0] = 7.9e-309
    assert det4(m) == 0.0
