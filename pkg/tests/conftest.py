"""Shared problem builders for the test suite."""

import numpy as np
import pytest

from dualgambit import ConeSpec, ConeVec, ConicProblem, Dense, Lorentz, Orthant, Psd, RankOne
from dualgambit.centering import damped_newton_step, make_oracle, newton_state
from dualgambit.model import apply_A


def random_interior(rng, cone, spread=0.3):
    """Random strictly interior point near the cone's unit element."""
    out = []
    for blk in cone.blocks:
        if isinstance(blk, Orthant):
            out.append(np.exp(spread * rng.standard_normal(blk.n)))
        elif isinstance(blk, Lorentz):
            u = spread * rng.standard_normal(blk.n - 1)
            v = np.concatenate([[np.linalg.norm(u) + np.exp(spread * rng.standard_normal())], u])
            out.append(v)
        else:
            B = spread * rng.standard_normal((blk.n, blk.n))
            out.append(np.eye(blk.n) + B @ B.T)
    return ConeVec(out)


def random_direction(rng, cone):
    out = []
    for blk in cone.blocks:
        if isinstance(blk, Psd):
            B = rng.standard_normal((blk.n, blk.n))
            out.append(0.5 * (B + B.T))
        else:
            out.append(rng.standard_normal(blk.n))
    return ConeVec(out)


def random_problem(rng, blocks, m):
    """Strictly primal and dual feasible instance with ``y_start = 0``."""
    cone = ConeSpec(blocks)
    rows = []
    for _ in range(m):
        row = {}
        for j, blk in enumerate(cone.blocks):
            if isinstance(blk, Psd):
                B = rng.standard_normal((blk.n, blk.n))
                row[j] = Dense(0.5 * (B + B.T))
            else:
                row[j] = Dense(rng.standard_normal(blk.n))
        rows.append(row)
    c = random_interior(rng, cone)
    tmp = ConicProblem(cone, rows, np.ones(m), c, np.zeros(m))
    x0 = random_interior(rng, cone)
    b = apply_A(tmp, x0)
    return ConicProblem(cone, rows, b, c, np.zeros(m))


def lrqi_problem(rng, m, n):
    vecs = -1.0 + 3.0 * rng.random((m, n))
    b = -1.0 + 3.0 * rng.random(m)
    rows = [{0: RankOne(1, vecs[i]), 1: RankOne(-1, vecs[i])} for i in range(m)]
    return ConicProblem(ConeSpec([Psd(n), Psd(n)]), rows, b, ConeVec([np.eye(n), np.eye(n)]), np.zeros(m))


def toy_lp():
    return ConicProblem(ConeSpec([Orthant(2)]), [{0: Dense(np.array([1.0, 1.0]))}], [1.0],
                        ConeVec([np.ones(2)]), [0.0])


def vector_equation_problem(a, b):
    n = a.shape[0]
    eye = np.eye(n)
    rows = [{0: Dense(0.5 * (np.outer(a, eye[i]) + np.outer(eye[i], a)))} for i in range(n)]
    return ConicProblem(ConeSpec([Psd(n)]), rows, b, ConeVec([eye]), np.zeros(n))


def rank_one_trace_problem(a):
    n = a.shape[0]
    return ConicProblem(ConeSpec([Psd(n)]), [{0: RankOne(1, a)}], [1.0], ConeVec([np.eye(n)]), [0.0])


def centered_iterate(problem, t, tol, y=None, oracle=None, max_steps=200):
    """Damped Newton on psi_t until the decrement drops to ``tol``."""
    oracle = oracle or make_oracle(problem)
    y = np.zeros(problem.m) if y is None else y
    for _ in range(max_steps):
        it = newton_state(oracle, problem.b, y, t)
        if it.lam <= tol:
            return it
        y = damped_newton_step(it)
    raise AssertionError("centering at fixed t did not converge")


MIXED_BLOCKS = [Orthant(3), Lorentz(4), Psd(3)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
