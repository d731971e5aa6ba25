import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualgambit import linalg
from dualgambit.errors import NotPositiveDefinite


def spd(rng, n, shift=0.5):
    B = rng.standard_normal((n, n))
    return B @ B.T + shift * np.eye(n)


def test_cholesky_reconstructs(rng):
    M = spd(rng, 6)
    L = linalg.cholesky(M)
    assert np.allclose(np.triu(L, 1), 0.0)
    assert np.allclose(L @ L.T, M, atol=1e-12)


def test_cholesky_identity_and_empty():
    assert np.array_equal(linalg.cholesky(np.eye(4)), np.eye(4))
    assert linalg.cholesky(np.zeros((0, 0))).shape == (0, 0)


@pytest.mark.parametrize("diag,pivot", [([1.0, 2.0, -1.0], 3), ([0.0, 1.0], 1), ([1.0, 0.0, 4.0], 2)])
def test_cholesky_reports_failing_pivot(diag, pivot):
    with pytest.raises(NotPositiveDefinite) as exc:
        linalg.cholesky(np.diag(diag))
    assert exc.value.pivot == pivot


def test_cholesky_rejects_bad_input():
    with pytest.raises(ValueError):
        linalg.cholesky(np.ones((2, 3)))
    with pytest.raises(NotPositiveDefinite):
        linalg.cholesky(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_solve_triangular_both_sides(rng):
    L = linalg.cholesky(spd(rng, 5))
    rhs = rng.standard_normal((5, 3))
    assert np.allclose(L @ linalg.solve_triangular(L, rhs), rhs)
    assert np.allclose(L.T @ linalg.solve_triangular(L, rhs, side="upper"), rhs)
    with pytest.raises(ValueError):
        linalg.solve_triangular(L, rhs, side="left")
    with pytest.raises(ValueError):
        linalg.solve_triangular(L, np.ones(4))


def test_congruence_reduce(rng):
    M = spd(rng, 5)
    L = linalg.cholesky(M)
    assert np.allclose(linalg.congruence_reduce(L, M), np.eye(5), atol=1e-12)
    H = rng.standard_normal((5, 5))
    H = H + H.T
    R = linalg.congruence_reduce(L, H)
    Linv = np.linalg.inv(L)
    assert np.allclose(R, Linv @ H @ Linv.T)
    assert np.array_equal(R, R.T)


def test_cholesky_inverse(rng):
    M = spd(rng, 7)
    inv = linalg.cholesky_inverse(linalg.cholesky(M))
    assert np.allclose(inv @ M, np.eye(7), atol=1e-10)
    assert np.array_equal(inv, inv.T)


def test_tridiagonalize_preserves_spectrum(rng):
    B = rng.standard_normal((6, 6))
    B = B + B.T
    T = linalg.householder_tridiagonalize(B)
    assert T.d.shape == (6,) and T.e.shape == (5,)
    # eigenvalues used only as a test oracle
    assert np.allclose(np.linalg.eigvalsh(T.dense()), np.linalg.eigvalsh(B))


def test_tridiagonalize_small():
    assert linalg.householder_tridiagonalize(np.zeros((0, 0))).n == 0
    T = linalg.householder_tridiagonalize(np.array([[3.0]]))
    assert T.d.tolist() == [3.0] and T.e.size == 0


def test_tridiag_logdet_identity():
    T = linalg.Tridiag(np.zeros(4), np.zeros(3))
    val, ok = linalg.tridiag_logdet(T, 2.0, 5.0)
    assert ok and val == pytest.approx(4 * math.log(2.0))


def test_tridiag_logdet_gamma_zero():
    T = linalg.Tridiag(np.array([1.0, -3.0]), np.array([1.0]))
    assert linalg.tridiag_logdet(T, 1.5, 0.0) == (pytest.approx(2 * math.log(1.5)), True)
    assert linalg.tridiag_logdet(T, -1.0, 0.0)[1] is False


def test_tridiag_logdet_detects_indefinite():
    T = linalg.Tridiag(np.array([1.0, 1.0]), np.array([2.0]))
    val, ok = linalg.tridiag_logdet(T, 0.0, 1.0)
    assert not ok and math.isnan(val)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 8), a=st.floats(0.1, 5.0), gamma=st.floats(-3.0, 3.0), seed=st.integers(0, 2**31))
def test_tridiag_logdet_matches_dense(n, a, gamma, seed):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    B = 0.5 * (B + B.T)
    T = linalg.householder_tridiagonalize(B)
    sign, ref = np.linalg.slogdet(a * np.eye(n) + gamma * B)
    val, ok = linalg.tridiag_logdet(T, a, gamma)
    # the recurrence reports success exactly when the matrix is positive definite
    pd = np.all(np.linalg.eigvalsh(a * np.eye(n) + gamma * B) > 1e-9)
    if pd:
        assert ok
        assert val == pytest.approx(ref, rel=1e-9, abs=1e-9)
    elif np.min(np.linalg.eigvalsh(a * np.eye(n) + gamma * B)) < -1e-9:
        assert not ok


def test_logdet_from_cholesky(rng):
    M = spd(rng, 5)
    assert linalg.logdet_from_cholesky(linalg.cholesky(M)) == pytest.approx(np.linalg.slogdet(M)[1])
