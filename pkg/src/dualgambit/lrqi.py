"""Random low-rank quadratic interpolation instances and batch statistics.

An instance with vectors ``a_1..a_m`` in ``R^n`` and values ``b`` is the SDP
pair over ``Psd(n) x Psd(n)`` with cost ``(I, I)`` and rows
``(a_i a_i^T, -a_i a_i^T)``. Its dual feasible set is bounded and ``y = 0``
is its analytic center.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cones import ConeSpec, ConeVec, Psd
from .model import ConicProblem, RankOne, Status
from .solver import SolverConfig, solve

__all__ = ["BenchStats", "InstanceResult", "emit_csv", "generate_lrqi", "penalty_monotone", "run_batch",
           "run_instance"]

CSV_HEADER = ["m", "n", "count", "pred_mean", "pred_relstd", "total_mean",
              "total_relstd", "time_mean_s", "failures"]


def generate_lrqi(m: int, n: int, seed: int) -> ConicProblem:
    """Random instance with entries of ``a_i`` and ``b`` uniform on ``[-1, 2]``.

    The stream is ``numpy.random.Philox`` keyed by ``seed``, so equal seeds
    give bit-identical instances on every platform.
    """
    if m < 1 or n < 2 * m:
        raise ValueError(f"need m >= 1 and n >= 2m, got m={m}, n={n}")
    rng = np.random.Generator(np.random.Philox(seed))
    vectors = -1.0 + 3.0 * rng.random((m, n))
    b = -1.0 + 3.0 * rng.random(m)
    rows = [{0: RankOne(1, vectors[i]), 1: RankOne(-1, vectors[i])} for i in range(m)]
    cone = ConeSpec([Psd(n), Psd(n)])
    c = ConeVec([np.eye(n), np.eye(n)])
    return ConicProblem(cone, rows, b, c, np.zeros(m))


@dataclass(frozen=True)
class InstanceResult:
    seed: int
    status: Status
    predictors: int
    iterations: int
    seconds: float
    t_monotone: bool  # t rises at every predictor and is fixed at correctors


@dataclass(frozen=True)
class BenchStats:
    m: int
    n: int
    count: int
    pred_mean: float
    pred_relstd: float  # percent
    total_mean: float
    total_relstd: float  # percent
    time_mean_s: float
    failures: int

    def key(self):
        """All fields except wall time."""
        return (self.m, self.n, self.count, self.pred_mean, self.pred_relstd,
                self.total_mean, self.total_relstd, self.failures)


def run_instance(m: int, n: int, seed: int, config: Optional[SolverConfig] = None) -> InstanceResult:
    problem = generate_lrqi(m, n, seed)
    start = time.perf_counter()
    sol = solve(problem, config)
    elapsed = time.perf_counter() - start
    return InstanceResult(seed, sol.status, sol.predictor_steps, sol.iterations, elapsed,
                          penalty_monotone(sol.trace))


def penalty_monotone(trace) -> bool:
    for prev, cur in zip(trace, trace[1:]):
        if prev.phase == "Predictor" and not cur.t > prev.t:
            return False
        if prev.phase == "Corrector" and cur.t != prev.t:
            return False
    return True


def _run_star(args):
    return run_instance(*args)


def _relstd(values: np.ndarray) -> float:
    mean = float(np.mean(values))
    return 100.0 * float(np.std(values)) / mean if mean else 0.0


def run_batch(m: int, n: int, count: int, seed: int, config: Optional[SolverConfig] = None,
              workers: int = 1, results: Optional[list] = None) -> BenchStats:
    """Solve instances with seeds ``seed .. seed + count - 1`` and aggregate.

    Failed solves are counted in ``failures`` and left out of the means.
    Pass a list as ``results`` to receive the per-instance records.
    """
    jobs = [(m, n, seed + i, config) for i in range(count)]
    if workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_run_star, jobs))
    else:
        out = [_run_star(j) for j in jobs]
    if results is not None:
        results.extend(out)
    ok = [r for r in out if r.status is Status.OPTIMAL]
    if ok:
        pred = np.array([r.predictors for r in ok], dtype=float)
        total = np.array([r.iterations for r in ok], dtype=float)
        secs = np.array([r.seconds for r in ok])
        return BenchStats(m, n, count, float(pred.mean()), _relstd(pred), float(total.mean()),
                          _relstd(total), float(secs.mean()), count - len(ok))
    nan = float("nan")
    return BenchStats(m, n, count, nan, nan, nan, nan, nan, count)


def emit_csv(stats: Sequence[BenchStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for s in stats:
        w.writerow([s.m, s.n, s.count, f"{s.pred_mean:.3f}", f"{s.pred_relstd:.1f}",
                    f"{s.total_mean:.3f}", f"{s.total_relstd:.1f}", f"{s.time_mean_s:.4f}", s.failures])
    return buf.getvalue()
