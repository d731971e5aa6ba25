"""Dual predictor-corrector interior-point solver for symmetric cone programs."""

from .centering import GenericOracle, LrqiShortOracle, make_oracle
from .cones import ConeSpec, ConeVec, Lorentz, Orthant, Psd, factorize
from .errors import (
    CenteringError,
    DualGambitError,
    NotInterior,
    NotPositiveDefinite,
    ParseError,
    SingularHessian,
    SingularProjection,
    ValidationError,
)
from .lrqi import BenchStats, emit_csv, generate_lrqi, run_batch
from .model import ConicProblem, Dense, RankOne, Solution, Status, read_problem, write_problem
from .solver import IterRecord, SolverConfig, check_solution, solve, trace_csv

__version__ = "0.1.0"

__all__ = [
    "BenchStats", "CenteringError", "ConeSpec", "ConeVec", "ConicProblem", "Dense",
    "DualGambitError", "GenericOracle", "IterRecord", "Lorentz", "LrqiShortOracle",
    "NotInterior", "NotPositiveDefinite", "Orthant", "ParseError", "Psd", "RankOne",
    "SingularHessian", "SingularProjection", "Solution", "SolverConfig", "Status",
    "ValidationError", "check_solution", "emit_csv", "factorize", "generate_lrqi",
    "make_oracle", "read_problem", "run_batch", "solve", "trace_csv", "write_problem",
]
