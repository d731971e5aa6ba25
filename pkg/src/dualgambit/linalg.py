"""Dense symmetric linear algebra built on Cholesky factorization.

Everything the solver needs from linear algebra goes through this module:
Cholesky factors, triangular solves, congruence transforms ``L^{-1} H L^{-T}``,
Householder tridiagonalization and log-determinants of shifted tridiagonal
matrices. No eigen- or singular-value decompositions are used anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import NotPositiveDefinite

__all__ = [
    "Tridiag",
    "cholesky",
    "cholesky_inverse",
    "congruence_reduce",
    "householder_tridiagonalize",
    "logdet_from_cholesky",
    "solve_triangular",
    "symmetrize",
    "tridiag_logdet",
]


@dataclass(frozen=True)
class Tridiag:
    """Symmetric tridiagonal matrix stored as diagonal ``d`` and off-diagonal ``e``."""

    d: np.ndarray
    e: np.ndarray

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def dense(self) -> np.ndarray:
        T = np.diag(self.d)
        if self.n > 1:
            T += np.diag(self.e, 1) + np.diag(self.e, -1)
        return T


def symmetrize(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def cholesky(M: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor ``L`` with ``L @ L.T == M``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is nonpositive. No regularization is attempted: a failed
        factorization means the point left the cone (or the Newton system
        is singular).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] == 0:
        return np.zeros((0, 0))
    if not np.all(np.isfinite(M)):
        raise NotPositiveDefinite(1, "matrix has non-finite entries")
    L, info = lapack.dpotrf(M, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefinite(int(info))
    if info < 0:
        raise ValueError(f"dpotrf: illegal argument {-info}")
    return L


def solve_triangular(L: np.ndarray, rhs: np.ndarray, side: str = "lower") -> np.ndarray:
    """Return ``L^{-1} rhs`` (``side="lower"``) or ``L^{-T} rhs`` (``side="upper"``)."""
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != L.shape[0]:
        raise ValueError(f"dimension mismatch: factor is {L.shape[0]}, rhs has {rhs.shape[0]} rows")
    if L.shape[0] == 0:
        return rhs.copy()
    trans = 0 if side == "lower" else 1
    return scipy.linalg.solve_triangular(L, rhs, lower=True, trans=trans, check_finite=False)


def congruence_reduce(L: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Return the symmetric matrix ``L^{-1} H L^{-T}``."""
    H = np.asarray(H, dtype=float)
    if H.shape != L.shape:
        raise ValueError(f"dimension mismatch: factor {L.shape}, matrix {H.shape}")
    W = solve_triangular(L, H)
    R = solve_triangular(L, W.T).T
    return symmetrize(R)


def cholesky_inverse(L: np.ndarray) -> np.ndarray:
    """Inverse of ``L L^T`` from its lower Cholesky factor."""
    if L.shape[0] == 0:
        return np.zeros((0, 0))
    inv, info = lapack.dpotri(L, lower=1)
    if info != 0:
        raise NotPositiveDefinite(int(abs(info)))
    return np.tril(inv) + np.tril(inv, -1).T


def householder_tridiagonalize(B: np.ndarray) -> Tridiag:
    """Orthogonally similar tridiagonal form of the symmetric matrix ``B``.

    Backed by LAPACK ``dsytrd``; the orthogonal factor is never formed since
    only determinants of ``a I + g T`` are needed downstream.
    """
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    if n == 0:
        return Tridiag(np.zeros(0), np.zeros(0))
    if n == 1:
        return Tridiag(B[0:1, 0].copy(), np.zeros(0))
    _, d, e, _, info = lapack.dsytrd(B, lower=1)
    if info != 0:
        raise ValueError(f"dsytrd failed with info={info}")
    return Tridiag(np.array(d), np.array(e))


def tridiag_logdet(T: Tridiag, a: float, gamma: float) -> tuple[float, bool]:
    """Log-determinant of ``a I + gamma T`` via the LDL^T pivot recurrence.

    Returns ``(logdet, True)`` when the matrix is positive definite and
    ``(nan, False)`` at the first nonpositive pivot.
    """
    d = T.d
    e = T.e
    n = d.shape[0]
    if n == 0:
        return 0.0, True
    if gamma == 0.0:
        if a <= 0.0:
            return math.nan, False
        return n * math.log(a), True
    p = a + gamma * float(d[0])
    if not p > 0.0:
        return math.nan, False
    logdet = math.log(p)
    for k in range(1, n):
        off = gamma * float(e[k - 1])
        p = a + gamma * float(d[k]) - off * off / p
        if not p > 0.0:
            return math.nan, False
        logdet += math.log(p)
    return logdet, True


def logdet_from_cholesky(L: np.ndarray) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(L))))
