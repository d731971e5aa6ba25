"""Dual predictor-corrector main loop.

Each iteration factorizes the dual Newton system once. If the decrement
exceeds ``beta`` a damped Newton corrector is taken at fixed ``t``; otherwise
the predictor applies the gambit rule, follows the affine-scaling direction
and increases ``t``. The method stops once ``nu / t <= eps``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .centering import (
    damped_newton_step,
    fallback_t,
    initial_center,
    initial_t,
    make_oracle,
    newton_state,
)
from .cones import factorize, interior_dual
from .errors import CenteringError, NotInterior, SingularHessian, ValidationError
from .model import ConicProblem, Solution, Status, apply_A, apply_A_adjoint, dual_slack
from .predictor import (
    affine_direction,
    gambit_point,
    proximity_budget_delta,
    s_hat_sqnorm,
    solve_stepsize,
    update_t,
    xi_omega,
    xi_primal,
)

__all__ = [
    "CONTROLLERS",
    "IterRecord",
    "SolutionReport",
    "SolverConfig",
    "check_solution",
    "solve",
    "trace_csv",
]

log = logging.getLogger(__name__)

CONTROLLERS = ("dual", "primal", "omega")


@dataclass(frozen=True)
class SolverConfig:
    """Method parameters.

    Parameters
    ----------
    beta : float
        Centering threshold on the Newton decrement, in ``(0, 1)``.
    prox_budget : float
        Proximity budget ``A`` used by the step-size equation.
    eps : float
        Target for ``nu / t``.
    max_iter : int
    bisect_tol : float
        Relative tolerance of the step-size search (multiplied by ``A``).
    controller : {"dual", "primal", "omega"}
        Step-size function: dual barrier, primal barrier or direct proximity.
    """

    beta: float = 0.2
    prox_budget: float = 2.0
    eps: float = 1e-8
    max_iter: int = 5000
    bisect_tol: float = 1e-3
    controller: str = "dual"

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.prox_budget > 0.0:
            raise ValueError(f"prox_budget must be positive, got {self.prox_budget}")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if not 0.0 < self.bisect_tol < 1.0:
            raise ValueError(f"bisect_tol must lie in (0, 1), got {self.bisect_tol}")
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}, got {self.controller!r}")


@dataclass
class IterRecord:
    k: int
    phase: str  # "Corrector" or "Predictor"
    lam: float
    t: float
    gap: Optional[float] = None
    alpha: Optional[float] = None
    bisections: Optional[int] = None


def _primal_estimate(problem, y, t):
    """Central-path primal estimate ``-(1/t) grad F_*(s)``; ``None`` off the domain."""
    try:
        return -(1.0 / t) * factorize(problem.cone, dual_slack(problem, y)).grad()
    except NotInterior:
        return None


def solve(problem: ConicProblem, config: Optional[SolverConfig] = None, oracle=None,
          on_predictor=None) -> Solution:
    """Solve ``problem`` with the dual predictor-corrector method.

    Parameters
    ----------
    problem : ConicProblem
        Needs ``y_start`` unless it has the LRQI structure (then ``y = 0``).
    config : SolverConfig, optional
    oracle : optional
        Dual barrier oracle; chosen by :func:`~dualgambit.centering.make_oracle`
        when omitted.
    on_predictor : callable, optional
        Called as ``on_predictor(it)`` with the :class:`DualIterate` of every
        predictor step before it is taken. Meant for diagnostics.

    Returns
    -------
    Solution
        On success ``x = x_hat + alpha dx`` of the last predictor, and
        ``gap = <s, x>``.
    """
    config = config or SolverConfig()
    oracle = oracle or make_oracle(problem)
    b = problem.b
    nu = problem.nu
    beta = config.beta
    A = config.prox_budget

    y = problem.y_start
    if y is None:
        if problem.lrqi_vectors is None:
            raise ValidationError("problem has no starting point y0")
        y = np.zeros(problem.m)
    if not oracle.feasible(y):
        raise ValidationError("starting point is not strictly dual feasible")

    log.debug("proximity budget slack delta = %.4g", proximity_budget_delta(A, beta))

    trace: list[IterRecord] = []

    def failure(message, y_last, t_last):
        s_last = dual_slack(problem, y_last)
        x_last = _primal_estimate(problem, y_last, t_last) if t_last else None
        gap = s_last.dot(x_last) if x_last is not None else math.nan
        return Solution(x_last, y_last, s_last, gap, t_last or math.nan,
                        Status.NUMERICAL_FAILURE, trace, message)

    # with t0 from the centered start the first decrement equals beta up to
    # rounding, so iteration 0 is a predictor by construction
    force_predictor = True
    try:
        y, it0 = initial_center(oracle, b, y, beta)
        t = initial_t(it0, b, beta)
    except CenteringError:
        force_predictor = False
        # zeta has no minimizer: start from y0 with the t that best centers it
        try:
            it0 = newton_state(oracle, b, y, 0.0)
        except SingularHessian as exc:
            return failure(str(exc), y, None)
        t = fallback_t(it0, b)
        log.info("dual feasible set looks unbounded; starting at t = %.4g", t)
    except (SingularHessian, NotInterior) as exc:
        return failure(f"initial centering failed: {exc}", y, None)

    for k in range(config.max_iter):
        try:
            it = newton_state(oracle, b, y, t)
        except (SingularHessian, NotInterior) as exc:
            return failure(str(exc), y, t)

        if it.lam > beta and not (k == 0 and force_predictor):
            y_next = damped_newton_step(it)
            trace.append(IterRecord(k, "Corrector", it.lam, t))
            if not oracle.feasible(y_next):
                return failure("corrector left the dual feasible set", y, t)
            y = y_next
            continue

        if on_predictor is not None:
            on_predictor(it)
        sq = s_hat_sqnorm(nu, it)
        h = it.solve(b)
        dy = t * h
        y_hat = y + it.d
        try:
            if config.controller == "dual":
                xi = oracle.xi_evaluator(y_hat, dy)
            else:
                frame = affine_direction(problem, it, gambit_point(problem, it))
                xi = xi_primal(frame) if config.controller == "primal" else xi_omega(problem, frame)
        except NotInterior as exc:
            return failure(f"gambit point is not interior: {exc}", y, t)
        alpha, nbis = solve_stepsize(xi, A, config.bisect_tol * A)
        t_next = update_t(nu, t, alpha, sq)
        trace.append(IterRecord(k, "Predictor", it.lam, t, sq / t, alpha, nbis))
        y_prev = y
        y = y_hat + alpha * dy
        if not (t_next > t and math.isfinite(t_next)):
            return failure(f"penalty update failed (t = {t_next})", y_prev, t)
        if nu / t_next <= config.eps:
            return _finish(problem, y_prev, it, alpha, y, t_next, trace)
        t = t_next

    s = dual_slack(problem, y)
    x = _primal_estimate(problem, y, t)
    gap = s.dot(x) if x is not None else math.nan
    return Solution(x, y, s, gap, t, Status.ITER_LIMIT, trace,
                    f"iteration limit {config.max_iter} reached")


def _finish(problem, y_bar, it, alpha, y, t_next, trace):
    # x = (1 - alpha) x_hat + alpha hess F_*(s_bar) A* h, with x_hat = (1/t) hess F_*(s_bar) s_hat
    t = it.t
    fact = factorize(problem.cone, dual_slack(problem, y_bar))
    s_hat = dual_slack(problem, y_bar + it.d)
    h = it.solve(problem.b)
    x = fact.hess(((1.0 - alpha) / t) * s_hat + alpha * apply_A_adjoint(problem, h))
    # A x = b holds in exact arithmetic; refine away rounding from the ill-conditioned end game
    for _ in range(2):
        r = problem.b - apply_A(problem, x)
        x = x + fact.hess(apply_A_adjoint(problem, it.solve(r)))
    s = dual_slack(problem, y)
    return Solution(x, y, s, s.dot(x), t_next, Status.OPTIMAL, trace, "")


@dataclass
class SolutionReport:
    primal_residual: float
    dual_residual: float
    x_interior: bool
    s_interior: bool
    gap: float
    gap_nonnegative: bool

    def ok(self, tol: float) -> bool:
        return (self.primal_residual <= tol and self.dual_residual <= tol
                and self.x_interior and self.s_interior and self.gap >= -1e-9)


def check_solution(problem: ConicProblem, sol: Solution, tol: float = 1e-9) -> SolutionReport:
    """Residuals, interiority flags and duality gap of ``sol``.

    ``tol`` is the slack allowed before the gap counts as negative.
    """
    if sol.x is None:
        pr = math.inf
        x_int = False
        gap = math.nan
    else:
        pr = float(np.max(np.abs(apply_A(problem, sol.x) - problem.b)))
        x_int = interior_dual(problem.cone, sol.x)
        gap = problem.c.dot(sol.x) - float(problem.b @ sol.y)
    expected = dual_slack(problem, sol.y)
    dr = max(float(np.max(np.abs(a - e))) for a, e in zip(sol.s.blocks, expected.blocks))
    return SolutionReport(pr, dr, x_int, interior_dual(problem.cone, sol.s), gap, gap >= -tol)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def trace_csv(trace) -> str:
    """Trace as CSV: ``k,phase,lambda,t,gap,alpha,bisections``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "phase", "lambda", "t", "gap", "alpha", "bisections"])
    for r in trace:
        w.writerow([r.k, r.phase, _cell(r.lam), _cell(r.t), _cell(r.gap), _cell(r.alpha), _cell(r.bisections)])
    return buf.getvalue()
