import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gauss_sep.criteria import ppt_full
from gauss_sep.errors import ContractError, DomainError, RepresentationError
from gauss_sep.gaussian_state import (
    OMEGA,
    CovarianceMatrix,
    LocalSymplectic,
    SqueezeParams,
    StandardForm,
    apply_symplectic,
    build_p_function,
    is_physical,
    p_condition,
    p_function_moments,
    partial_transpose,
    sample_p_function,
    to_standard_form,
)
from gauss_sep.oracle import random_physical_covariance

from strategies import local_symplectics, physical_standard_forms

TMSV = CovarianceMatrix.two_mode_squeezed_vacuum(0.5)


def test_symplectic_form_constants():
    np.testing.assert_array_equal(OMEGA, -OMEGA.T)
    np.testing.assert_array_equal(OMEGA @ OMEGA, -np.eye(4))


def test_block_views():
    v = StandardForm(1.0, 2.0, 0.3, -0.1).covariance()
    np.testing.assert_array_equal(v.A, np.eye(2))
    np.testing.assert_array_equal(v.B, 2 * np.eye(2))
    np.testing.assert_array_equal(v.C, np.diag([0.3, -0.1]))


@pytest.mark.parametrize(
    "v, psd, min_eig",
    [
        (0.5 * np.eye(4), True, 0.0),
        (np.eye(4), True, 0.5),
        (0.25 * np.eye(4), False, -0.25),
    ],
)
def test_is_physical_examples(v, psd, min_eig):
    m = is_physical(CovarianceMatrix(v))
    assert m.is_psd is psd
    assert m.min_eigenvalue == pytest.approx(min_eig, abs=1e-14)


def test_partial_transpose_examples():
    d = CovarianceMatrix(np.diag([1.0, 2, 3, 4]))
    np.testing.assert_array_equal(partial_transpose(d).v, d.v)
    sf = StandardForm(1.2, 0.9, 0.4, -0.3)
    np.testing.assert_array_equal(
        partial_transpose(sf.covariance()).v, StandardForm(1.2, 0.9, 0.4, 0.3).covariance().v
    )


@given(st.integers(0, 10**6))
def test_partial_transpose_is_bit_exact_involution(seed):
    v = random_physical_covariance(seed)
    assert np.array_equal(partial_transpose(partial_transpose(v)).v, v.v)


def test_apply_symplectic_matches_squeezed_standard_form():
    a, b, c1, c2, r1, r2 = 1.3, 0.8, 0.4, -0.25, 1.7, 0.6
    out = apply_symplectic(StandardForm(a, b, c1, c2).covariance(), SqueezeParams(r1, r2).symplectic())
    rr = math.sqrt(r1 * r2)
    expected = np.array(
        [
            [a * r1, 0, c1 * rr, 0],
            [0, a / r1, 0, c2 / rr],
            [c1 * rr, 0, b * r2, 0],
            [0, c2 / rr, 0, b / r2],
        ]
    )
    np.testing.assert_allclose(out.v, expected, rtol=1e-14)


def test_pi_rotation_flips_both_couplings():
    sf = StandardForm(1.1, 0.9, 0.3, -0.2)
    out = apply_symplectic(sf.covariance(), LocalSymplectic.rotation(math.pi, 0.0))
    np.testing.assert_allclose(out.v, StandardForm(1.1, 0.9, -0.3, 0.2).covariance().v, atol=1e-15)
    np.testing.assert_allclose(apply_symplectic(sf.covariance(), LocalSymplectic.identity()).v, sf.covariance().v)


def test_local_symplectic_validation():
    with pytest.raises(ContractError):
        LocalSymplectic(np.diag([2.0, 1.0]), np.eye(2))
    with pytest.raises(ContractError):
        SqueezeParams(0.0, 1.0)


@given(local_symplectics())
def test_local_symplectic_preserves_form(s):
    S = s.matrix
    np.testing.assert_allclose(S @ OMEGA @ S.T, OMEGA, atol=1e-9)
    np.testing.assert_allclose((s @ s.inverse()).matrix, np.eye(4), atol=1e-9)


def test_standard_form_fixed_point():
    sf0 = StandardForm(1.0, 1.0, 0.5, -0.3)
    sf, s = to_standard_form(sf0.covariance())
    for x, y in zip((sf.a, sf.b, sf.c1, sf.c2), (1.0, 1.0, 0.5, -0.3)):
        assert x == pytest.approx(y, abs=1e-12)
    np.testing.assert_allclose(np.abs(s.matrix), np.eye(4), atol=1e-12)


@given(local_symplectics())
def test_standard_form_recovers_parameters(r):
    v = apply_symplectic(StandardForm(1.5, 0.8, 0.4, -0.2).covariance(), r)
    sf, s = to_standard_form(v)
    np.testing.assert_allclose([sf.a, sf.b, sf.c1, sf.c2], [1.5, 0.8, 0.4, -0.2], atol=1e-9)
    np.testing.assert_allclose(apply_symplectic(v, s).v, sf.covariance().v, atol=1e-9)


def test_two_mode_squeezed_vacuum_standard_form():
    sf, _ = to_standard_form(TMSV)
    assert sf.a == pytest.approx(math.cosh(1) / 2, abs=1e-12)
    assert sf.b == pytest.approx(0.7715403, abs=1e-7)
    assert sf.c1 == pytest.approx(0.5876005, abs=1e-7)
    assert sf.c2 == pytest.approx(-sf.c1, abs=1e-12)


def test_unphysical_reduction_raises_with_margin():
    with pytest.raises(DomainError) as info:
        to_standard_form(CovarianceMatrix(0.25 * np.eye(4)))
    assert info.value.margin.min_eigenvalue == pytest.approx(-0.25)


def test_degenerate_correlations_give_undefined_ratio():
    sf, _ = to_standard_form(CovarianceMatrix(np.diag([1.0, 2.0, 0.7, 0.9])))
    assert sf.c1 == pytest.approx(0.0, abs=1e-15) and sf.c2 == pytest.approx(0.0, abs=1e-15)
    assert StandardForm(1, 1, 0.0, 0.0).t is None
    assert StandardForm(1, 1, 0.4, -0.2).t == pytest.approx(0.5)


def test_canonical_relabel():
    assert StandardForm(1, 1, 0.2, -0.5).canonical() == StandardForm(1, 1, 0.5, -0.2)
    assert StandardForm(1, 1, -0.5, 0.2).canonical() == StandardForm(1, 1, 0.5, -0.2)
    # the relabelling is realised by local rotations, so the PPT verdict survives it
    for sf in (StandardForm(1, 1, 0.2, -0.5), StandardForm(1, 1, -0.5, 0.2)):
        assert ppt_full(sf.covariance()).min_eigenvalue == pytest.approx(
            ppt_full(sf.canonical().covariance()).min_eigenvalue, abs=1e-12
        )


@given(st.integers(0, 2**32 - 1))
def test_reduction_invariants(seed):
    v = random_physical_covariance(seed)
    sf, s = to_standard_form(v)
    w = sf.covariance()
    assert sf.a >= 0.5 - 1e-12 and sf.b >= 0.5 - 1e-12
    assert sf.c1 >= abs(sf.c2) >= 0
    m = np.max(np.abs(v.v))
    for blk in ("A", "B", "C"):
        x, y = np.linalg.det(getattr(v, blk)), np.linalg.det(getattr(w, blk))
        assert abs(x - y) <= 1e-9 * max(abs(x), m * m)
    assert abs(np.linalg.det(v.v) - np.linalg.det(w.v)) <= 1e-9 * max(abs(np.linalg.det(v.v)), m**4)
    np.testing.assert_allclose(apply_symplectic(sf.covariance(), s.inverse()).v, v.v, atol=1e-9)


@given(st.integers(0, 2**32 - 1), local_symplectics())
def test_verdicts_are_local_symplectic_invariant(seed, s):
    v = random_physical_covariance(seed)
    w = apply_symplectic(v, s)
    for check in (is_physical, ppt_full):
        mv, mw = check(v), check(w)
        if not (mv.on_boundary() or mw.on_boundary()):
            assert mv.is_psd == mw.is_psd


def test_p_condition_examples():
    m = p_condition(CovarianceMatrix(0.5 * np.eye(4)))
    assert m.min_eigenvalue == pytest.approx(0.0, abs=1e-15) and m.is_psd
    assert p_condition(CovarianceMatrix(np.eye(4))).min_eigenvalue == pytest.approx(0.5)
    m = p_condition(TMSV)
    assert not m.is_psd
    assert m.min_eigenvalue == pytest.approx((math.cosh(1) - 1) / 2 - math.sinh(1) / 2)


@given(st.lists(st.floats(-2, 2), min_size=16, max_size=16))
def test_p_condition_implies_physical(xs):
    g = np.array(xs).reshape(4, 4)
    v = CovarianceMatrix(0.5 * (g + g.T))
    if p_condition(v).is_psd:
        assert is_physical(v).is_psd


def test_build_p_function_examples():
    pf = build_p_function(CovarianceMatrix(np.eye(4)))
    np.testing.assert_allclose(pf.precision, 2 * np.eye(4))
    assert pf.norm_factor == pytest.approx(1 / math.pi**2)
    pf = build_p_function(CovarianceMatrix(1.5 * np.eye(4)))
    np.testing.assert_allclose(pf.precision, np.eye(4))
    assert pf.norm_factor == pytest.approx(1 / (4 * math.pi**2))
    with pytest.raises(RepresentationError):
        build_p_function(CovarianceMatrix(0.5 * np.eye(4)))
    with pytest.raises(RepresentationError):
        build_p_function(TMSV)


def test_p_function_normalised():
    from scipy import integrate

    pf = build_p_function(CovarianceMatrix(np.diag([1.0, 0.8, 1.2, 0.7])))
    # product of 1-D Gaussians, so integrate each marginal coordinate separately
    total = 1.0
    for k in range(4):
        p = pf.precision[k, k]
        total *= integrate.quad(lambda x: math.exp(-0.5 * p * x * x), -np.inf, np.inf)[0]
    assert pf.norm_factor * total == pytest.approx(1.0, rel=1e-9)
    np.testing.assert_allclose(np.linalg.inv(pf.precision) + 0.5 * np.eye(4), np.diag([1.0, 0.8, 1.2, 0.7]), atol=1e-9)


@pytest.mark.parametrize("diag", [[1, 1, 1, 1], [2, 1, 2, 1]])
def test_p_function_moments_recover_covariance(diag):
    v = CovarianceMatrix(np.diag(np.array(diag, dtype=float)))
    n = 10**6
    pf = build_p_function(v)
    x = sample_p_function(pf, n, seed=7)
    x = x - x.mean(axis=0)
    se = np.array([[(x[:, i] * x[:, j]).std() for j in range(4)] for i in range(4)]) / math.sqrt(n)
    got = p_function_moments(pf, n, seed=7)
    assert np.all(np.abs(got.v - v.v) < 5 * se)


def test_p_function_moments_deterministic():
    pf = build_p_function(CovarianceMatrix(np.eye(4)))
    a = p_function_moments(pf, 2000, seed=3)
    b = p_function_moments(pf, 2000, seed=3)
    assert np.array_equal(a.v, b.v)
    with pytest.raises(ContractError):
        p_function_moments(pf, 10, seed=3)


def test_json_round_trip():
    v = random_physical_covariance(5)
    back = CovarianceMatrix.from_json_dict(v.to_json_dict())
    assert np.array_equal(back.v, v.v)
    sf = StandardForm(1.0, 0.75, 0.3, -0.1)
    assert StandardForm.from_dict(sf.to_dict()) == sf
    with pytest.raises(ContractError):
        CovarianceMatrix.from_json_dict({"v": [[1, 0], [0, 1]]})
    with pytest.raises(ContractError):
        CovarianceMatrix.from_json_dict({"ordering": "q1 q2 p1 p2", "v": np.eye(4).tolist()})


@given(physical_standard_forms())
def test_standard_forms_reduce_to_themselves(sf):
    got, _ = to_standard_form(sf.covariance())
    np.testing.assert_allclose([got.a, got.b], [sf.a, sf.b], atol=1e-9)
    assert got.c1 == pytest.approx(sf.canonical().c1, abs=1e-9)
    assert got.c2 == pytest.approx(sf.canonical().c2, abs=1e-9)
