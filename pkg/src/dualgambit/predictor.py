"""Predictor step: gambit point, affine-scaling direction and step size.

At a dual point ``y_bar`` with Newton step ``d_bar`` (decrement at most
``beta``) the predictor moves *backwards* to ``y_hat = y_bar + d_bar`` and
pairs it with the primal point ``x_hat = (1/t) hess F_*(s_bar) s_hat``,
which is feasible for the primal problem. The affine-scaling direction is
then followed as far as the proximity budget allows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import linalg
from .centering import DualIterate
from .cones import ConeVec, Factorization, factorize
from .errors import NotInterior, NotPositiveDefinite, SingularProjection
from .model import ConicProblem, apply_A, apply_A_adjoint, dual_slack

__all__ = [
    "ALPHA_CAP",
    "GambitFrame",
    "affine_direction",
    "alpha_from_tau",
    "gambit_point",
    "omega_aux",
    "omega_measure",
    "omega_star_aux",
    "omega_t",
    "proximity_budget_delta",
    "reference_t",
    "restricted_norm",
    "s_hat_sqnorm",
    "solve_stepsize",
    "tau_from_alpha",
    "update_t",
    "xi_dual",
    "xi_omega",
    "xi_primal",
]

ALPHA_CAP = 1.0 - 1e-9
_TAU_START = 1e-4


@dataclass
class GambitFrame:
    """Everything the predictor knows at one gambit point.

    The direction fields (``h``, ``dy``, ``ds``, ``dx``) are ``None`` until
    :func:`affine_direction` fills them in.
    """

    t: float
    lam: float
    y_bar: np.ndarray
    d_bar: np.ndarray
    y_hat: np.ndarray
    s_bar: ConeVec
    s_hat: ConeVec
    x_bar: ConeVec
    x_hat: ConeVec
    fact_bar: Factorization
    s_hat_sqnorm: float
    h: Optional[np.ndarray] = None
    dy: Optional[np.ndarray] = None
    ds: Optional[ConeVec] = None
    dx: Optional[ConeVec] = None

    @property
    def w_star(self) -> ConeVec:
        return math.sqrt(self.t) * self.s_bar

    def point(self, alpha: float):
        """Primal-dual triple ``z_hat + alpha dz``."""
        return (self.x_hat + alpha * self.dx, self.y_hat + alpha * self.dy, self.s_hat + alpha * self.ds)


def s_hat_sqnorm(nu: float, it: DualIterate) -> float:
    """``|s_hat|^2_{s_bar}`` from Newton data alone.

    Expanding ``s_hat = s_bar - A* d_bar`` in the local norm at ``s_bar`` gives
    ``nu - 2 <d_bar, grad zeta> + lam^2``.
    """
    return nu - 2.0 * float(it.d @ it.grad) + it.lam**2


def gambit_point(problem: ConicProblem, it: DualIterate) -> GambitFrame:
    """Apply the gambit rule at the Newton iterate ``it``.

    Raises
    ------
    NotInterior
        If ``s_hat`` is not interior, which cannot happen for ``lam < 1``.
    """
    s_bar = dual_slack(problem, it.y)
    fact = factorize(problem.cone, s_bar)
    y_hat = it.y + it.d
    s_hat = dual_slack(problem, y_hat)
    factorize(problem.cone, s_hat)
    Hs = fact.hess(s_hat)
    return GambitFrame(
        t=it.t,
        lam=it.lam,
        y_bar=it.y,
        d_bar=it.d,
        y_hat=y_hat,
        s_bar=s_bar,
        s_hat=s_hat,
        x_bar=-(1.0 / it.t) * fact.grad(),
        x_hat=(1.0 / it.t) * Hs,
        fact_bar=fact,
        s_hat_sqnorm=Hs.dot(s_hat),
    )


def affine_direction(problem: ConicProblem, it: DualIterate, frame: GambitFrame) -> GambitFrame:
    """Fill in the affine-scaling direction, reusing the Hessian factor of ``it``."""
    h = it.solve(problem.b)
    Ah = apply_A_adjoint(problem, h)
    frame.h = h
    frame.dy = frame.t * h
    frame.ds = -frame.t * Ah
    frame.dx = frame.fact_bar.hess(Ah) - frame.x_hat
    return frame


# ---------------------------------------------------------------------------
# step size


def tau_from_alpha(alpha: float) -> float:
    return alpha * alpha / (1.0 - alpha)


def alpha_from_tau(tau: float) -> float:
    """Inverse of ``tau = alpha^2 / (1 - alpha)`` on ``[0, 1)``."""
    if tau <= 0.0:
        return 0.0
    return 2.0 / (1.0 + math.sqrt(1.0 + 4.0 / tau))


def solve_stepsize(xi: Callable[[float], float], A: float, tol: Optional[float] = None,
                   alpha_cap: float = ALPHA_CAP) -> tuple[float, int]:
    """Largest ``alpha`` (to tolerance) with ``xi(alpha) <= A``.

    The search runs in ``tau = alpha^2 / (1 - alpha)``: ``tau`` doubles from
    ``1e-4`` until ``xi >= A`` or the cap is reached, then the bracket is
    bisected. ``xi`` may return ``inf`` outside its domain.

    Parameters
    ----------
    xi : callable
        Nondecreasing on ``[0, 1)`` with ``xi(0) = 0``.
    A : float
        Target value.
    tol : float, optional
        Absolute tolerance on ``A - xi(alpha)``; default ``1e-3 * A``.
    alpha_cap : float

    Returns
    -------
    alpha : float
        Satisfies ``xi(alpha) <= A``.
    bisections : int
        Number of bisection halvings performed.
    """
    if A <= 0.0:
        return 0.0, 0
    if tol is None:
        tol = 1e-3 * A
    tau_cap = tau_from_alpha(alpha_cap)

    def below(v):
        return v <= A  # False for nan and inf

    lo, xi_lo = 0.0, 0.0
    tau = _TAU_START
    while True:
        if tau >= tau_cap:
            v = xi(alpha_cap)
            if below(v):
                return alpha_cap, 0
            hi = tau_cap
            break
        v = xi(alpha_from_tau(tau))
        if not below(v) or v == A:
            if v == A:
                return alpha_from_tau(tau), 0
            hi = tau
            break
        lo, xi_lo = tau, v
        tau *= 2.0

    count = 0
    while A - xi_lo > tol and hi - lo > 1e-12 * hi:
        mid = 0.5 * (lo + hi)
        v = xi(alpha_from_tau(mid))
        count += 1
        if below(v):
            lo, xi_lo = mid, v
        else:
            hi = mid
    return alpha_from_tau(lo), count


def xi_dual(frame: GambitFrame):
    """Dual step-size function built from ``(s_hat, ds)``."""
    return factorize(frame.fact_bar.cone, frame.s_hat).xi(frame.ds)


def xi_primal(frame: GambitFrame):
    """Primal step-size function built from ``(x_hat, dx)``."""
    return factorize(frame.fact_bar.cone, frame.x_hat).xi(frame.dx)


def xi_omega(problem: ConicProblem, frame: GambitFrame):
    """``alpha -> Omega(z_hat + alpha dz) - Omega(z_hat)`` by direct evaluation."""
    x0, y0, s0 = frame.point(0.0)
    base = omega_measure(problem, x0, y0, s0)

    def xi(alpha):
        if alpha == 0.0:
            return 0.0
        x, y, s = frame.point(alpha)
        try:
            return omega_measure(problem, x, y, s) - base
        except NotInterior:
            return math.inf

    return xi


def update_t(nu: float, t: float, alpha: float, sqnorm: float) -> float:
    """``nu t / ((1 - alpha) |s_hat|^2_{s_bar})``."""
    return nu * t / ((1.0 - alpha) * sqnorm)


# ---------------------------------------------------------------------------
# proximity


def omega_aux(tau: float) -> float:
    """``tau - log(1 + tau)`` for ``tau > -1``."""
    if not tau > -1.0:
        raise ValueError(f"omega is defined for tau > -1, got {tau}")
    return tau - math.log1p(tau)


def omega_star_aux(tau: float) -> float:
    """``-tau - log(1 - tau)`` for ``tau`` in ``[0, 1)``."""
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"omega_* is defined on [0, 1), got {tau}")
    return -tau - math.log1p(-tau)


def proximity_budget_delta(A: float, beta: float) -> float:
    """Slack ``delta`` such that ``A = delta + omega_*(2 beta / (1 - beta)^2)``."""
    return A - omega_star_aux(2.0 * beta / (1.0 - beta) ** 2)


def omega_measure(problem: ConicProblem, x: ConeVec, y, s: ConeVec) -> float:
    """Functional proximity ``nu log<s,x> + F(x) + F_*(s) + nu - nu log nu``."""
    nu = problem.nu
    sx = s.dot(x)
    if not sx > 0.0:
        raise NotInterior("<s, x> must be positive")
    Fx = factorize(problem.cone, x).primal_value()
    Fs = factorize(problem.cone, s).dual_value()
    return nu * math.log(sx) + Fx + Fs + nu - nu * math.log(nu)


def omega_t(problem: ConicProblem, x: ConeVec, y, s: ConeVec, t: float) -> float:
    """Penalized proximity ``t gap + F(x) + F_*(s) - nu log t``."""
    gap = problem.c.dot(x) - float(problem.b @ y)
    Fx = factorize(problem.cone, x).primal_value()
    Fs = factorize(problem.cone, s).dual_value()
    return t * gap + Fx + Fs - problem.nu * math.log(t)


def reference_t(problem: ConicProblem, x: ConeVec, y) -> float:
    """``nu / (<c, x> - <b, y>)``."""
    gap = problem.c.dot(x) - float(problem.b @ y)
    if not gap > 0.0:
        raise ValueError(f"duality gap must be positive, got {gap}")
    return problem.nu / gap


def restricted_norm(problem: Optional[ConicProblem], x: ConeVec, s: ConeVec, cone=None) -> float:
    """Dual norm of ``s`` at ``x`` restricted to the null space of ``A``.

    ``sqrt(<s, H^{-1} s> - <r, (A H^{-1} A*)^{-1} r>)`` with
    ``H = hess F(x)`` and ``r = A H^{-1} s``. Pass ``problem=None`` together
    with ``cone`` for the unconstrained case.

    Raises
    ------
    SingularProjection
        If ``A H^{-1} A*`` is not positive definite.
    """
    cone = problem.cone if problem is not None else cone
    fact = factorize(cone, x)
    u = fact.hess_inv(s)
    total = u.dot(s)
    if problem is None:
        return math.sqrt(max(total, 0.0))
    # hess F(x)^{-1} = hess F(-grad F(x)) on these cones
    fw = factorize(cone, -fact.grad())
    gram = sum(op.hess_part(f) for op, f in zip(problem.block_ops(), fw.factors))
    try:
        L = linalg.cholesky(linalg.symmetrize(gram))
    except NotPositiveDefinite:
        raise SingularProjection("A H^{-1} A* is singular; A may be rank deficient") from None
    w = linalg.solve_triangular(L, apply_A(problem, u))
    return math.sqrt(max(total - float(w @ w), 0.0))
