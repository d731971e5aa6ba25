"""Symmetric cone blocks and their logarithmic barriers.

Three block types are supported: the nonnegative orthant, the Lorentz
(second-order) cone and the cone of positive semidefinite matrices. All three
are self-dual, and the primal barrier ``F`` and dual barrier ``F_*`` only
differ by an additive constant::

    orthant   F(x) = -sum(log x)             F_*(s) = -sum(log s) - n
    lorentz   F(x) = -log(x0^2 - |x1:|^2)    F_*(s) = -log(s0^2 - |s1:|^2) - 2 + 2 log 2
    psd       F(X) = -log det X              F_*(S) = -log det S - n

The constants make ``F(x) + F_*(-grad F(x)) == -nu`` hold exactly.

Points are stored as :class:`ConeVec`, a list with one numpy array per block
(a vector for orthant and Lorentz blocks, a symmetric matrix for PSD blocks).
Derivative work is routed through :class:`Factorization`, which is built once
per interior point and caches whatever each block needs (the point itself,
the Lorentz quadratic form, or a Cholesky factor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import linalg
from .errors import NotInterior, NotPositiveDefinite

__all__ = [
    "ConeSpec",
    "ConeVec",
    "Factorization",
    "Lorentz",
    "Orthant",
    "Psd",
    "XiEvaluator",
    "barrier_dual_value",
    "barrier_primal_value",
    "factorize",
    "grad_dual",
    "hess_dual_apply",
    "interior_dual",
    "local_norm_dual",
    "nu",
    "prepare_xi",
    "xi_eval",
]

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class Orthant:
    n: int

    nu = property(lambda self: self.n)
    shape = property(lambda self: (self.n,))
    dual_shift = property(lambda self: float(self.n))
    keyword = "lp"

    def unit(self):
        return np.ones(self.n)


@dataclass(frozen=True)
class Lorentz:
    """Second-order cone ``{(tau, u): tau >= |u|}`` of total dimension ``n``."""

    n: int

    nu = property(lambda self: 2)
    shape = property(lambda self: (self.n,))
    dual_shift = property(lambda self: 2.0 - 2.0 * LOG2)
    keyword = "soc"

    def unit(self):
        v = np.zeros(self.n)
        v[0] = 1.0
        return v


@dataclass(frozen=True)
class Psd:
    n: int

    nu = property(lambda self: self.n)
    shape = property(lambda self: (self.n, self.n))
    dual_shift = property(lambda self: float(self.n))
    keyword = "sdp"

    def unit(self):
        return np.eye(self.n)


Block = Union[Orthant, Lorentz, Psd]


class ConeVec:
    """Block-partitioned element of the primal or dual space."""

    __slots__ = ("blocks",)

    def __init__(self, blocks: Sequence[np.ndarray]):
        self.blocks = [np.asarray(b, dtype=float) for b in blocks]

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]

    def __add__(self, other):
        return ConeVec([a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        return ConeVec([a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return ConeVec([-a for a in self.blocks])

    def __mul__(self, alpha):
        return ConeVec([alpha * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, alpha):
        return ConeVec([a / alpha for a in self.blocks])

    def dot(self, other) -> float:
        return float(sum(np.vdot(a, b) for a, b in zip(self.blocks, other.blocks)))

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def copy(self):
        return ConeVec([a.copy() for a in self.blocks])

    def flat(self) -> np.ndarray:
        if not self.blocks:
            return np.zeros(0)
        return np.concatenate([a.ravel() for a in self.blocks])

    def __repr__(self):
        return f"ConeVec({self.blocks!r})"


@dataclass(frozen=True)
class ConeSpec:
    """Ordered product of cone blocks."""

    blocks: tuple

    def __init__(self, blocks):
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def nu(self) -> int:
        return sum(b.nu for b in self.blocks)

    @property
    def dim(self) -> int:
        return sum(int(np.prod(b.shape)) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def zeros(self) -> ConeVec:
        return ConeVec([np.zeros(b.shape) for b in self.blocks])

    def unit(self) -> ConeVec:
        return ConeVec([b.unit() for b in self.blocks])

    def check(self, v: ConeVec) -> None:
        if len(v) != len(self.blocks):
            raise ValueError(f"expected {len(self.blocks)} blocks, got {len(v)}")
        for i, (blk, arr) in enumerate(zip(self.blocks, v)):
            if arr.shape != blk.shape:
                raise ValueError(f"block {i}: expected shape {blk.shape}, got {arr.shape}")


def nu(cone: ConeSpec) -> int:
    return cone.nu


# ---------------------------------------------------------------------------
# per-block factorizations


class _OrthantFactor:
    def __init__(self, v):
        if not np.all(v > 0.0):
            raise NotInterior("orthant block has a nonpositive entry")
        self.v = v

    def phi(self):
        return -float(np.sum(np.log(self.v)))

    def grad(self):
        return -1.0 / self.v

    def hess(self, g):
        return g / self.v**2

    def hess_inv(self, g):
        return self.v**2 * g

    def hess_matrix_rows(self, rows):
        # rows: (m, n) block of the constraint operator
        return (rows / self.v**2) @ rows.T

    def xi(self, dv):
        return _OrthantXi(dv / self.v)


class _LorentzFactor:
    def __init__(self, v):
        tau = float(v[0])
        omega = tau * tau - float(v[1:] @ v[1:])
        if not (tau > 0.0 and omega > 0.0):
            raise NotInterior("Lorentz block is not strictly inside the cone")
        self.v = v
        self.omega = omega
        self.Jv = v.copy()
        self.Jv[1:] *= -1.0

    def phi(self):
        return -math.log(self.omega)

    def grad(self):
        return -2.0 * self.Jv / self.omega

    def hess(self, g):
        Jg = g.copy()
        Jg[1:] *= -1.0
        w = self.omega
        return (4.0 / w**2) * float(self.Jv @ g) * self.Jv - (2.0 / w) * Jg

    def hess_inv(self, g):
        Jg = g.copy()
        Jg[1:] *= -1.0
        return float(self.v @ g) * self.v - 0.5 * self.omega * Jg

    def hess_matrix_rows(self, rows):
        w = self.omega
        p = rows @ self.Jv
        Jrows = rows.copy()
        Jrows[:, 1:] *= -1.0
        return (4.0 / w**2) * np.outer(p, p) - (2.0 / w) * (Jrows @ rows.T)

    def xi(self, dv):
        w = self.omega
        d1 = (float(self.v[0] * dv[0]) - float(self.v[1:] @ dv[1:])) / w
        d2 = (float(dv[0] * dv[0]) - float(dv[1:] @ dv[1:])) / w
        return _LorentzXi(float(dv[0]) / float(self.v[0]), d1, d2)


class _PsdFactor:
    def __init__(self, V, L=None):
        if L is None:
            try:
                L = linalg.cholesky(V)
            except NotPositiveDefinite as exc:
                raise NotInterior(f"PSD block is not positive definite (pivot {exc.pivot})") from None
        self.v = V
        self.L = L

    def phi(self):
        return -linalg.logdet_from_cholesky(self.L)

    def inverse(self):
        return linalg.cholesky_inverse(self.L)

    def grad(self):
        return -self.inverse()

    def hess(self, g):
        W = linalg.congruence_reduce(self.L, g)
        Z = linalg.solve_triangular(self.L, W, side="upper")
        return linalg.symmetrize(linalg.solve_triangular(self.L, Z.T, side="upper").T)

    def hess_inv(self, g):
        return linalg.symmetrize(self.v @ g @ self.v)

    def xi(self, dv):
        B = linalg.congruence_reduce(self.L, dv)
        return _PsdXi(linalg.householder_tridiagonalize(B))


def _block_factor(block: Block, v: np.ndarray):
    if isinstance(block, Orthant):
        return _OrthantFactor(v)
    if isinstance(block, Lorentz):
        return _LorentzFactor(v)
    return _PsdFactor(v)


class Factorization:
    """Cached barrier data at an interior point ``v`` of a cone product.

    The same object serves the primal and the dual barrier since they share
    derivatives. ``phi`` is the barrier value without the dual constant.
    """

    def __init__(self, cone: ConeSpec, v: ConeVec, factors=None):
        self.cone = cone
        self.point = v
        self.factors = factors if factors is not None else [
            _block_factor(b, arr) for b, arr in zip(cone.blocks, v.blocks)
        ]

    def phi(self) -> float:
        return sum(f.phi() for f in self.factors)

    def dual_value(self) -> float:
        return self.phi() - sum(b.dual_shift for b in self.cone.blocks)

    def primal_value(self) -> float:
        return self.phi()

    def grad(self) -> ConeVec:
        return ConeVec([f.grad() for f in self.factors])

    def hess(self, g: ConeVec) -> ConeVec:
        return ConeVec([f.hess(gb) for f, gb in zip(self.factors, g.blocks)])

    def hess_inv(self, g: ConeVec) -> ConeVec:
        return ConeVec([f.hess_inv(gb) for f, gb in zip(self.factors, g.blocks)])

    def local_norm(self, g: ConeVec) -> float:
        return math.sqrt(max(self.hess(g).dot(g), 0.0))

    def local_norm_inv(self, g: ConeVec) -> float:
        return math.sqrt(max(self.hess_inv(g).dot(g), 0.0))

    def xi(self, direction: ConeVec) -> "XiEvaluator":
        return XiEvaluator([f.xi(dv) for f, dv in zip(self.factors, direction.blocks)])


def factorize(cone: ConeSpec, v: ConeVec) -> Factorization:
    """Factorize an interior point; raises :class:`NotInterior` otherwise."""
    cone.check(v)
    return Factorization(cone, v)


def interior_dual(cone: ConeSpec, s: ConeVec) -> bool:
    try:
        factorize(cone, s)
    except NotInterior:
        return False
    return True


def barrier_dual_value(cone: ConeSpec, s: ConeVec) -> float:
    return factorize(cone, s).dual_value()


def barrier_primal_value(cone: ConeSpec, x: ConeVec) -> float:
    return factorize(cone, x).primal_value()


def grad_dual(cone: ConeSpec, s: ConeVec) -> ConeVec:
    return factorize(cone, s).grad()


def hess_dual_apply(fact: Factorization, g: ConeVec) -> ConeVec:
    return fact.hess(g)


def local_norm_dual(fact: Factorization, g: ConeVec) -> float:
    return fact.local_norm(g)


# ---------------------------------------------------------------------------
# step-size functions xi(alpha)
#
# Each block evaluator exposes ``neglog(c)``: the barrier increase
# F(v + c dv) - F(v), or +inf when v + c dv leaves the cone. Then
#   xi(alpha) = sum_blocks neglog(alpha) + neglog(-alpha / (1 - alpha)).


class _OrthantXi:
    def __init__(self, r):
        self.r = r

    def neglog(self, c):
        f = 1.0 + c * self.r
        if not np.all(f > 0.0):
            return math.inf
        return -float(np.sum(np.log(f)))


class _LorentzXi:
    """Scalars of the Lorentz short form.

    ``rho`` is the relative change of the leading coordinate, ``delta1`` and
    ``delta2`` the linear and quadratic coefficients of the normalized
    quadratic form along the direction.
    """

    def __init__(self, rho, delta1, delta2):
        self.rho = rho
        self.delta1 = delta1
        self.delta2 = delta2
        self.a1 = delta1 + 2.0 * delta1**2 - delta2
        self.a2 = delta2**2 + 2.0 * delta1 * delta2 + delta2

    def neglog(self, c):
        q = 1.0 + 2.0 * c * self.delta1 + c * c * self.delta2
        if not (1.0 + c * self.rho > 0.0 and q > 0.0):
            return math.inf
        return -math.log(q)

    def single_log(self, alpha):
        """Combined one-logarithm form; valid only where both points are interior."""
        tau = alpha * alpha / (1.0 - alpha)
        return -math.log(1.0 - 2.0 * tau * self.a1 + tau * tau * self.a2)


class _PsdXi:
    def __init__(self, T: linalg.Tridiag):
        self.T = T

    def neglog(self, c):
        val, ok = linalg.tridiag_logdet(self.T, 1.0, c)
        return -val if ok else math.inf


class XiEvaluator:
    """Evaluates ``F(v + a dv) + F(v - a/(1-a) dv) - 2 F(v)`` in O(block size)."""

    def __init__(self, parts):
        self.parts = list(parts)

    def neglog(self, c: float) -> float:
        total = 0.0
        for p in self.parts:
            val = p.neglog(c)
            if val == math.inf:
                return math.inf
            total += val
        return total

    def __call__(self, alpha: float) -> float:
        if alpha == 0.0:
            return 0.0
        if not 0.0 <= alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
        first = self.neglog(alpha)
        if first == math.inf:
            return math.inf
        second = self.neglog(-alpha / (1.0 - alpha))
        if second == math.inf:
            return math.inf
        return first + second


def prepare_xi(fact: Factorization, ds: ConeVec) -> XiEvaluator:
    return fact.xi(ds)


def xi_eval(ev: XiEvaluator, alpha: float) -> float:
    return ev(alpha)
