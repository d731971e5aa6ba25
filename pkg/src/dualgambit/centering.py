"""Dual barrier oracles, the dual Newton system and damped-Newton centering.

The dual barrier is ``zeta(y) = F_*(c - A* y)`` and the penalized objective
is ``psi_t(y) = zeta(y) - t <b, y>``. Two oracles evaluate ``zeta``:

* :class:`GenericOracle` works for any :class:`~dualgambit.model.ConicProblem`.
* :class:`LrqiShortOracle` exploits the LRQI structure and works entirely in
  ``R^{m x m}``. It differs from the generic value by the constant ``-nu``;
  gradients and Hessians coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from .cones import ConeSpec, ConeVec, Psd, factorize
from .errors import CenteringError, NotInterior, NotPositiveDefinite, SingularHessian
from .model import ConicProblem, apply_A_adjoint, dual_slack

__all__ = [
    "DualIterate",
    "GenericOracle",
    "LrqiShortOracle",
    "damped_newton_step",
    "fallback_t",
    "initial_center",
    "initial_t",
    "make_oracle",
    "newton_state",
]

CENTERING_MAX_ITER = 500


@dataclass
class OracleState:
    value: float
    grad: np.ndarray
    hess: np.ndarray


class GenericOracle:
    """Dual barrier of an arbitrary conic problem, evaluated block by block."""

    def __init__(self, problem: ConicProblem):
        self.problem = problem

    def slack(self, y):
        return dual_slack(self.problem, y)

    def feasible(self, y) -> bool:
        try:
            factorize(self.problem.cone, self.slack(y))
        except NotInterior:
            return False
        return True

    def evaluate(self, y) -> OracleState:
        fact = factorize(self.problem.cone, self.slack(y))
        m = self.problem.m
        grad = np.zeros(m)
        hess = np.zeros((m, m))
        for op, factor in zip(self.problem.block_ops(), fact.factors):
            grad += op.grad_part(factor)
            hess += op.hess_part(factor)
        return OracleState(fact.dual_value(), grad, linalg.symmetrize(hess))

    def value(self, y) -> float:
        return factorize(self.problem.cone, self.slack(y)).dual_value()

    def grad(self, y) -> np.ndarray:
        return self.evaluate(y).grad

    def hess(self, y) -> np.ndarray:
        return self.evaluate(y).hess

    def xi_evaluator(self, y_hat, dy):
        """``alpha -> zeta(y_hat + alpha dy) + zeta(y_hat - alpha/(1-alpha) dy) - 2 zeta(y_hat)``."""
        fact = factorize(self.problem.cone, self.slack(y_hat))
        return fact.xi(-apply_A_adjoint(self.problem, dy))


class LrqiShortOracle:
    """Dual barrier of an LRQI instance in ``m x m`` form.

    With ``G = A A^T`` and ``M(y) = G^{-1} -/+ diag(y)``::

        zeta(y) = -log det(G^{-1} - D(y)) - log det(G^{-1} + D(y)) - 2 log det G

    Parameters
    ----------
    vectors : ndarray, shape (m, n)
        Interpolation vectors ``a_i`` as rows. Must have full row rank.
    """

    def __init__(self, vectors: np.ndarray):
        vectors = np.asarray(vectors, dtype=float)
        self.vectors = vectors
        G = vectors @ vectors.T
        try:
            LG = linalg.cholesky(G)
        except NotPositiveDefinite:
            raise ValueError("interpolation vectors are linearly dependent") from None
        self.G = G
        self.Ginv = linalg.cholesky_inverse(LG)
        self.logdet_G = linalg.logdet_from_cholesky(LG)
        self.m = G.shape[0]
        self._pair = ConeSpec([Psd(self.m), Psd(self.m)])

    def _pair_matrices(self, y):
        D = np.diag(np.asarray(y, dtype=float))
        return self.Ginv - D, self.Ginv + D

    def _factors(self, y):
        minus, plus = self._pair_matrices(y)
        try:
            return linalg.cholesky(minus), linalg.cholesky(plus)
        except NotPositiveDefinite:
            raise NotInterior("y is not strictly dual feasible") from None

    def feasible(self, y) -> bool:
        try:
            self._factors(y)
        except NotInterior:
            return False
        return True

    def value(self, y) -> float:
        Lm, Lp = self._factors(y)
        return -linalg.logdet_from_cholesky(Lm) - linalg.logdet_from_cholesky(Lp) - 2.0 * self.logdet_G

    def evaluate(self, y) -> OracleState:
        Lm, Lp = self._factors(y)
        P = linalg.cholesky_inverse(Lm)
        Q = linalg.cholesky_inverse(Lp)
        value = -linalg.logdet_from_cholesky(Lm) - linalg.logdet_from_cholesky(Lp) - 2.0 * self.logdet_G
        return OracleState(value, np.diag(P) - np.diag(Q), P * P + Q * Q)

    def grad(self, y) -> np.ndarray:
        return self.evaluate(y).grad

    def hess(self, y) -> np.ndarray:
        return self.evaluate(y).hess

    def xi_evaluator(self, y_hat, dy):
        fact = factorize(self._pair, ConeVec(self._pair_matrices(y_hat)))
        D = np.diag(np.asarray(dy, dtype=float))
        return fact.xi(ConeVec([-D, D]))


def make_oracle(problem: ConicProblem):
    """Short oracle for LRQI-structured problems, generic oracle otherwise."""
    vecs = problem.lrqi_vectors
    if vecs is not None:
        try:
            return LrqiShortOracle(vecs)
        except ValueError:
            pass
    return GenericOracle(problem)


@dataclass
class DualIterate:
    """Newton data of ``psi_t`` at ``y``.

    ``d`` solves ``hess(zeta) d = grad(zeta) - t b`` and ``lam`` is the Newton
    decrement. The Cholesky factor is kept so that further right-hand sides
    (notably ``b`` in the predictor) cost two triangular solves.
    """

    y: np.ndarray
    t: float
    value: float
    grad: np.ndarray
    hess: np.ndarray
    hess_chol: np.ndarray
    d: np.ndarray
    lam: float

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return scipy.linalg.cho_solve((self.hess_chol, True), rhs, check_finite=False)

    def local_norm_inv(self, v: np.ndarray) -> float:
        """``<v, hess^{-1} v>^{1/2}``."""
        w = linalg.solve_triangular(self.hess_chol, v)
        return float(math.sqrt(w @ w))


def newton_state(oracle, b: np.ndarray, y: np.ndarray, t: float) -> DualIterate:
    """Factorize the dual Hessian at ``y`` and compute the Newton step of ``psi_t``.

    Raises
    ------
    NotInterior
        If ``y`` is not strictly feasible.
    SingularHessian
        If the Hessian is not positive definite.
    """
    y = np.asarray(y, dtype=float)
    st = oracle.evaluate(y)
    try:
        L = linalg.cholesky(st.hess)
    except NotPositiveDefinite as exc:
        raise SingularHessian(f"dual Hessian is singular (pivot {exc.pivot})") from None
    g = st.grad - t * b
    d = scipy.linalg.cho_solve((L, True), g, check_finite=False)
    lam = math.sqrt(max(float(g @ d), 0.0))
    return DualIterate(y, float(t), st.value, st.grad, st.hess, L, d, lam)


def damped_newton_step(it: DualIterate) -> np.ndarray:
    return it.y - it.d / (1.0 + it.lam)


def initial_center(oracle, b, y_start, beta: float, max_iter: int = CENTERING_MAX_ITER):
    """Damped Newton on ``zeta`` until ``|grad zeta(y)|_y <= beta / 2``.

    Returns
    -------
    y0 : ndarray
    it : DualIterate
        Newton data of ``zeta`` (``t = 0``) at ``y0``.

    Raises
    ------
    CenteringError
        After ``max_iter`` steps, which happens when the dual feasible set is
        unbounded and ``zeta`` has no minimizer.
    """
    y = np.asarray(y_start, dtype=float).copy()
    it = newton_state(oracle, b, y, 0.0)
    for _ in range(max_iter):
        if it.lam <= 0.5 * beta:
            return y, it
        y = damped_newton_step(it)
        try:
            it = newton_state(oracle, b, y, 0.0)
        except (NotInterior, SingularHessian) as exc:
            # iterates running off to infinity eventually break down numerically
            raise CenteringError(f"dual centering diverged: {exc}") from None
    if it.lam <= 0.5 * beta:
        return y, it
    raise CenteringError(f"dual centering did not converge in {max_iter} iterations "
                         f"(decrement {it.lam:.3g}); the dual feasible set may be unbounded")


def initial_t(it: DualIterate, b: np.ndarray, beta: float) -> float:
    """``(beta - |grad zeta|_y) / |b|_y`` from the ``t = 0`` Newton data at ``y0``."""
    return (beta - it.lam) / it.local_norm_inv(b)


def fallback_t(it: DualIterate, b: np.ndarray) -> float:
    """Penalty minimizing the Newton decrement of ``psi_t`` at ``it.y``.

    Used when ``zeta`` has no minimizer. The minimizer of
    ``|grad zeta - t b|_y`` over ``t`` is ``<grad zeta, h> / <b, h>`` with
    ``h = hess^{-1} b``. When that is not positive, ``1 / |b|_y`` is used.
    """
    h = it.solve(b)
    bb = float(b @ h)
    t_star = float(it.grad @ h) / bb
    if t_star > 0.0 and math.isfinite(t_star):
        return t_star
    return 1.0 / math.sqrt(bb)
