"""Primal-dual conic problem data.

The problem pair is::

    min  <c, x>   s.t.  A x = b,  x in K
    max  <b, y>   s.t.  s + A* y = c,  s in K*

``A`` is stored row by row. Each row holds one constraint element per block it
touches, either a dense array or, for PSD blocks, a signed rank-one matrix
``sign * a a^T``. Blocks missing from a row are zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .cones import ConeSpec, ConeVec, Lorentz, Orthant, Psd
from .errors import ParseError, ValidationError

__all__ = [
    "ConicProblem",
    "Dense",
    "RankOne",
    "Solution",
    "Status",
    "apply_A",
    "apply_A_adjoint",
    "densify",
    "detect_lrqi",
    "dual_slack",
    "duality_gap",
    "read_problem",
    "write_problem",
]


@dataclass(frozen=True)
class Dense:
    data: np.ndarray


@dataclass(frozen=True)
class RankOne:
    """``sign * a a^T`` on a PSD block."""

    sign: int
    a: np.ndarray


def densify(element) -> np.ndarray:
    if isinstance(element, Dense):
        return np.asarray(element.data, dtype=float)
    return element.sign * np.outer(element.a, element.a)


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    ITER_LIMIT = "IterLimit"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass
class Solution:
    x: Optional[ConeVec]
    y: np.ndarray
    s: ConeVec
    gap: float
    t_final: float
    status: Status
    trace: list = field(default_factory=list)
    message: str = ""

    @property
    def predictor_steps(self) -> int:
        return sum(1 for r in self.trace if r.phase == "Predictor")

    @property
    def iterations(self) -> int:
        return len(self.trace)


# ---------------------------------------------------------------------------
# per-block operators


class _VectorBlockOp:
    """Orthant or Lorentz block: the rows form a dense (m, n) matrix."""

    def __init__(self, rows):
        self.R = rows

    def apply(self, xb):
        return self.R @ xb

    def adjoint(self, y):
        return self.R.T @ y

    def grad_part(self, factor):
        return -(self.R @ factor.grad())

    def hess_part(self, factor):
        return factor.hess_matrix_rows(self.R)

    def stack(self):
        return self.R


class _RankOneBlockOp:
    """PSD block whose every nonzero row is ``sign_i a_i a_i^T``."""

    def __init__(self, signs, vectors):
        self.signs = signs
        self.V = vectors  # (m, n)

    def apply(self, X):
        return self.signs * np.einsum("ij,jk,ik->i", self.V, X, self.V)

    def adjoint(self, y):
        return (self.V.T * (self.signs * y)) @ self.V

    def grad_part(self, factor):
        W = linalg.solve_triangular(factor.L, self.V.T)
        return self.signs * np.einsum("ij,ij->j", W, W)

    def hess_part(self, factor):
        W = linalg.solve_triangular(factor.L, self.V.T)
        M = W.T @ W
        return np.outer(self.signs, self.signs) * M * M

    def stack(self):
        return self.signs[:, None, None] * np.einsum("ij,ik->ijk", self.V, self.V)


class _DensePsdBlockOp:
    def __init__(self, stack):
        self.S = stack  # (m, n, n)

    def apply(self, X):
        return np.tensordot(self.S, X, axes=([1, 2], [0, 1]))

    def adjoint(self, y):
        return np.tensordot(y, self.S, axes=(0, 0))

    def grad_part(self, factor):
        Sinv = factor.inverse()
        return np.tensordot(self.S, Sinv, axes=([1, 2], [0, 1]))

    def hess_part(self, factor):
        m = self.S.shape[0]
        red = np.stack([linalg.congruence_reduce(factor.L, self.S[i]) for i in range(m)])
        flat = red.reshape(m, -1)
        return flat @ flat.T

    def stack(self):
        return self.S


# ---------------------------------------------------------------------------


@dataclass
class ConicProblem:
    """Conic problem in standard primal-dual form.

    Parameters
    ----------
    cone : ConeSpec
    rows : list of dict
        ``rows[i]`` maps block index to a :class:`Dense` or :class:`RankOne`
        element of the i-th constraint.
    b : ndarray, shape (m,)
        Nonzero right-hand side.
    c : ConeVec
        Cost, an element of the dual space.
    y_start : ndarray, optional
        Strictly dual feasible starting point.
    """

    cone: ConeSpec
    rows: list
    b: np.ndarray
    c: ConeVec
    y_start: Optional[np.ndarray] = None

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.y_start is not None:
            self.y_start = np.asarray(self.y_start, dtype=float).ravel()
        self._validate()
        self._ops = [self._compile_block(j) for j in range(len(self.cone))]
        self._lrqi = detect_lrqi(self)

    @property
    def m(self) -> int:
        return self.b.shape[0]

    @property
    def nu(self) -> int:
        return self.cone.nu

    @property
    def lrqi_vectors(self) -> Optional[np.ndarray]:
        """Interpolation vectors (m, n) when the problem has the LRQI structure."""
        return self._lrqi

    def _validate(self):
        m = self.b.shape[0]
        if m == 0:
            raise ValidationError("problem has no constraints")
        if len(self.rows) != m:
            raise ValidationError(f"{len(self.rows)} constraint rows but b has length {m}")
        if not np.any(self.b != 0.0):
            raise ValidationError("right-hand side b must be nonzero")
        if not np.all(np.isfinite(self.b)):
            raise ValidationError("b has non-finite entries")
        try:
            self.cone.check(self.c)
        except ValueError as exc:
            raise ValidationError(f"cost vector: {exc}") from None
        for i, row in enumerate(self.rows):
            for j, el in row.items():
                if not 0 <= j < len(self.cone):
                    raise ValidationError(f"row {i}: block index {j} out of range")
                blk = self.cone.blocks[j]
                if isinstance(el, RankOne):
                    if not isinstance(blk, Psd):
                        raise ValidationError(f"row {i}: rank-one element on non-PSD block {j}")
                    if el.sign not in (1, -1):
                        raise ValidationError(f"row {i}: rank-one sign must be +1 or -1")
                    if np.asarray(el.a).shape != (blk.n,):
                        raise ValidationError(f"row {i}, block {j}: rank-one vector has wrong length")
                elif isinstance(el, Dense):
                    if np.asarray(el.data).shape != blk.shape:
                        raise ValidationError(f"row {i}, block {j}: dense element has shape "
                                              f"{np.asarray(el.data).shape}, expected {blk.shape}")
                else:
                    raise ValidationError(f"row {i}: unknown element type {type(el).__name__}")
        if self.y_start is not None and self.y_start.shape != (m,):
            raise ValidationError(f"y_start has length {self.y_start.shape[0]}, expected {m}")

    def _compile_block(self, j):
        blk = self.cone.blocks[j]
        m = self.m
        elements = [row.get(j) for row in self.rows]
        if isinstance(blk, Psd):
            present = [el for el in elements if el is not None]
            if present and all(isinstance(el, RankOne) for el in present):
                signs = np.zeros(m)
                V = np.zeros((m, blk.n))
                for i, el in enumerate(elements):
                    if el is not None:
                        signs[i] = el.sign
                        V[i] = el.a
                return _RankOneBlockOp(signs, V)
            stack = np.zeros((m, blk.n, blk.n))
            for i, el in enumerate(elements):
                if el is not None:
                    stack[i] = densify(el)
            return _DensePsdBlockOp(stack)
        R = np.zeros((m, blk.n))
        for i, el in enumerate(elements):
            if el is not None:
                R[i] = el.data
        return _VectorBlockOp(R)

    # used by the dual barrier oracle
    def block_ops(self):
        return self._ops


def apply_A(problem: ConicProblem, x: ConeVec) -> np.ndarray:
    problem.cone.check(x)
    out = np.zeros(problem.m)
    for op, xb in zip(problem.block_ops(), x.blocks):
        out += op.apply(xb)
    return out


def apply_A_adjoint(problem: ConicProblem, y: np.ndarray) -> ConeVec:
    y = np.asarray(y, dtype=float)
    if y.shape != (problem.m,):
        raise ValueError(f"y has shape {y.shape}, expected ({problem.m},)")
    return ConeVec([op.adjoint(y) for op in problem.block_ops()])


def dual_slack(problem: ConicProblem, y: np.ndarray) -> ConeVec:
    return problem.c - apply_A_adjoint(problem, y)


def duality_gap(problem: ConicProblem, x: ConeVec, y: np.ndarray) -> float:
    return problem.c.dot(x) - float(problem.b @ y)


def detect_lrqi(problem: ConicProblem) -> Optional[np.ndarray]:
    """Return the (m, n) interpolation vectors if ``problem`` is an LRQI instance.

    The structure is: two PSD blocks of equal order, cost ``(I, I)``, and row i
    equal to ``(a_i a_i^T, -a_i a_i^T)``.
    """
    blocks = problem.cone.blocks
    if len(blocks) != 2 or not all(isinstance(b, Psd) for b in blocks) or blocks[0].n != blocks[1].n:
        return None
    eye = np.eye(blocks[0].n)
    if not (np.array_equal(problem.c[0], eye) and np.array_equal(problem.c[1], eye)):
        return None
    vecs = []
    for row in problem.rows:
        first, second = row.get(0), row.get(1)
        if not (isinstance(first, RankOne) and isinstance(second, RankOne)):
            return None
        if len(row) != 2 or first.sign != 1 or second.sign != -1:
            return None
        if not np.array_equal(first.a, second.a):
            return None
        vecs.append(np.asarray(first.a, dtype=float))
    return np.array(vecs)


# ---------------------------------------------------------------------------
# text format


def _fmt(v: float) -> str:
    return repr(float(v))


def _upper(M: np.ndarray) -> np.ndarray:
    return M[np.triu_indices(M.shape[0])]


def _from_upper(vals, n):
    M = np.zeros((n, n))
    iu = np.triu_indices(n)
    M[iu] = vals
    M[(iu[1], iu[0])] = vals
    return M


def write_problem(problem: ConicProblem) -> str:
    """Serialize ``problem`` to the line-oriented text format."""
    out = ["cones " + " ".join(f"{b.keyword} {b.n}" for b in problem.cone.blocks),
           f"m {problem.m}"]
    for j, (blk, cb) in enumerate(zip(problem.cone.blocks, problem.c.blocks)):
        vals = _upper(cb) if isinstance(blk, Psd) else cb
        out.append(f"c {j} dense " + " ".join(_fmt(v) for v in vals))
    out.append("b " + " ".join(_fmt(v) for v in problem.b))
    for i, row in enumerate(problem.rows):
        for j in sorted(row):
            el = row[j]
            if isinstance(el, RankOne):
                sign = "+1" if el.sign > 0 else "-1"
                out.append(f"a {i} {j} rankone {sign} " + " ".join(_fmt(v) for v in el.a))
            else:
                data = np.asarray(el.data, dtype=float)
                vals = _upper(data) if isinstance(problem.cone.blocks[j], Psd) else data
                out.append(f"a {i} {j} dense " + " ".join(_fmt(v) for v in vals))
    if problem.y_start is not None:
        out.append("y0 " + " ".join(_fmt(v) for v in problem.y_start))
    return "\n".join(out) + "\n"


_BLOCK_TYPES = {"lp": Orthant, "soc": Lorentz, "sdp": Psd}


def _floats(tokens, lineno):
    try:
        vals = [float(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(lineno, f"bad number: {exc}") from None
    if not all(math.isfinite(v) for v in vals):
        raise ParseError(lineno, "non-finite number")
    return np.array(vals)


def _int(token, lineno, what):
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, f"{what} must be an integer, got {token!r}") from None


def read_problem(text: str) -> ConicProblem:
    """Parse the text format produced by :func:`write_problem`.

    Raises
    ------
    ParseError
        On malformed lines, with the 1-based line number.
    ValidationError
        When the parsed data is dimensionally inconsistent or ``b == 0``.
    """
    cone = None
    m = None
    c_blocks = {}
    b = None
    y0 = None
    rows = None

    def need_cone(lineno):
        if cone is None:
            raise ParseError(lineno, "'cones' directive must come first")

    def need_m(lineno):
        if m is None:
            raise ParseError(lineno, "'m' directive must precede constraint data")

    def block_data(blk, vals, lineno):
        if isinstance(blk, Psd):
            k = blk.n * (blk.n + 1) // 2
            if vals.shape[0] != k:
                raise ParseError(lineno, f"sdp {blk.n} block needs {k} values, got {vals.shape[0]}")
            return _from_upper(vals, blk.n)
        if vals.shape[0] != blk.n:
            raise ParseError(lineno, f"block needs {blk.n} values, got {vals.shape[0]}")
        return vals

    def block_index(token, lineno):
        j = _int(token, lineno, "block index")
        if not 0 <= j < len(cone.blocks):
            raise ParseError(lineno, f"block index {j} out of range")
        return j

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        key, args = tok[0], tok[1:]
        if key == "cones":
            if cone is not None:
                raise ParseError(lineno, "duplicate 'cones' directive")
            if not args or len(args) % 2:
                raise ParseError(lineno, "expected pairs '<type> <size>'")
            blocks = []
            for kind, size in zip(args[::2], args[1::2]):
                if kind not in _BLOCK_TYPES:
                    raise ParseError(lineno, f"unknown cone type {kind!r}")
                n = _int(size, lineno, "cone size")
                if n < 1:
                    raise ParseError(lineno, "cone size must be positive")
                blocks.append(_BLOCK_TYPES[kind](n))
            cone = ConeSpec(blocks)
        elif key == "m":
            need_cone(lineno)
            if m is not None or len(args) != 1:
                raise ParseError(lineno, "expected a single 'm M' directive")
            m = _int(args[0], lineno, "m")
            if m < 1:
                raise ParseError(lineno, "m must be positive")
            rows = [dict() for _ in range(m)]
        elif key == "c":
            need_cone(lineno)
            if len(args) < 2 or args[1] != "dense":
                raise ParseError(lineno, "expected 'c <block> dense v...'")
            j = block_index(args[0], lineno)
            if j in c_blocks:
                raise ParseError(lineno, f"duplicate cost for block {j}")
            c_blocks[j] = block_data(cone.blocks[j], _floats(args[2:], lineno), lineno)
        elif key == "b":
            need_m(lineno)
            if b is not None:
                raise ParseError(lineno, "duplicate 'b' directive")
            b = _floats(args, lineno)
            if b.shape[0] != m:
                raise ParseError(lineno, f"b needs {m} values, got {b.shape[0]}")
        elif key == "a":
            need_m(lineno)
            if len(args) < 3:
                raise ParseError(lineno, "expected 'a <row> <block> dense|rankone ...'")
            i = _int(args[0], lineno, "row index")
            if not 0 <= i < m:
                raise ParseError(lineno, f"row index {i} out of range")
            j = block_index(args[1], lineno)
            if j in rows[i]:
                raise ParseError(lineno, f"duplicate element for row {i}, block {j}")
            blk = cone.blocks[j]
            if args[2] == "dense":
                rows[i][j] = Dense(block_data(blk, _floats(args[3:], lineno), lineno))
            elif args[2] == "rankone":
                if not isinstance(blk, Psd):
                    raise ParseError(lineno, "rankone elements are only allowed on sdp blocks")
                if len(args) < 4 or args[3] not in ("+1", "-1", "1", "+", "-"):
                    raise ParseError(lineno, "rankone sign must be +1 or -1")
                sign = -1 if args[3].startswith("-") else 1
                vec = _floats(args[4:], lineno)
                if vec.shape[0] != blk.n:
                    raise ParseError(lineno, f"rankone vector needs {blk.n} values, got {vec.shape[0]}")
                rows[i][j] = RankOne(sign, vec)
            else:
                raise ParseError(lineno, f"unknown encoding {args[2]!r}")
        elif key == "y0":
            need_m(lineno)
            if y0 is not None:
                raise ParseError(lineno, "duplicate 'y0' directive")
            y0 = _floats(args, lineno)
            if y0.shape[0] != m:
                raise ParseError(lineno, f"y0 needs {m} values, got {y0.shape[0]}")
        else:
            raise ParseError(lineno, f"unknown directive {key!r}")

    if cone is None:
        raise ValidationError("missing 'cones' directive")
    if m is None:
        raise ValidationError("missing 'm' directive")
    if b is None:
        raise ValidationError("missing 'b' directive")
    missing = [j for j in range(len(cone.blocks)) if j not in c_blocks]
    if missing:
        raise ValidationError(f"missing cost for blocks {missing}")
    c = ConeVec([c_blocks[j] for j in range(len(cone.blocks))])
    return ConicProblem(cone, rows, b, c, y0)
