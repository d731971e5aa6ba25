"""Command-line interface: ``solve``, ``gen`` and ``bench``.

Exit codes: 0 success, 2 iteration limit, 3 numerical failure, 64 usage or
input errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import DualGambitError, ParseError
from .lrqi import emit_csv, generate_lrqi, run_batch
from .model import Status, read_problem, write_problem
from .solver import CONTROLLERS, SolverConfig, solve, trace_csv

EXIT_OK = 0
EXIT_ITER_LIMIT = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64

_STATUS_EXIT = {
    Status.OPTIMAL: EXIT_OK,
    Status.ITER_LIMIT: EXIT_ITER_LIMIT,
    Status.NUMERICAL_FAILURE: EXIT_NUMERICAL,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_config_flags(p):
    d = SolverConfig()
    p.add_argument("--beta", type=float, default=d.beta, help="centering threshold (default %(default)s)")
    p.add_argument("--prox-budget", type=float, default=d.prox_budget,
                   help="proximity budget A of the step-size equation (default %(default)s)")
    p.add_argument("--eps", type=float, default=d.eps, help="target for nu/t (default %(default)s)")
    p.add_argument("--max-iter", type=int, default=d.max_iter, help="iteration limit (default %(default)s)")
    p.add_argument("--controller", choices=CONTROLLERS, default=d.controller,
                   help="step-size function (default %(default)s)")
    p.add_argument("--bisect-tol", type=float, default=d.bisect_tol,
                   help="relative tolerance of the step-size search (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dualgambit", description="Dual predictor-corrector conic solver.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("input", help="problem file")
    _add_config_flags(p)
    p.add_argument("--trace", metavar="PATH", help="write the iteration trace as CSV")

    p = sub.add_parser("gen", help="generate a random LRQI instance")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", required=True)

    p = sub.add_parser("bench", help="solve batches of random LRQI instances")
    p.add_argument("--m", type=_int_list, required=True, help="comma-separated list")
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated list")
    p.add_argument("--count", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _add_config_flags(p)
    p.add_argument("--out", metavar="PATH", help="write the statistics as CSV")
    return parser


def _config(args) -> SolverConfig:
    return SolverConfig(beta=args.beta, prox_budget=args.prox_budget, eps=args.eps,
                        max_iter=args.max_iter, bisect_tol=args.bisect_tol, controller=args.controller)


def _err(msg):
    print(f"dualgambit: {msg}", file=sys.stderr)


def _cmd_solve(args) -> int:
    config = _config(args)
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _err(f"cannot read {args.input}: {exc.strerror}")
        return EXIT_USAGE
    try:
        problem = read_problem(text)
    except ParseError as exc:
        _err(f"{args.input}:{exc.line}: {exc.reason}")
        return EXIT_USAGE
    except DualGambitError as exc:
        _err(f"{args.input}: {exc}")
        return EXIT_USAGE
    try:
        sol = solve(problem, config)
    except DualGambitError as exc:
        _err(str(exc))
        return EXIT_USAGE
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace_csv(sol.trace))
    primal = problem.c.dot(sol.x) if sol.x is not None else float("nan")
    dual = float(problem.b @ sol.y)
    print(f"status      {sol.status.value}")
    print(f"<c,x>       {primal:.12g}")
    print(f"<b,y>       {dual:.12g}")
    print(f"gap         {sol.gap:.3e}")
    print(f"iterations  {sol.iterations}")
    print(f"predictors  {sol.predictor_steps}")
    if sol.message:
        print(f"message     {sol.message}")
    return _STATUS_EXIT[sol.status]


def _cmd_gen(args) -> int:
    try:
        problem = generate_lrqi(args.m, args.n, args.seed)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(f"# LRQI instance m={args.m} n={args.n} seed={args.seed}\n")
        fh.write(write_problem(problem))
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    config = _config(args)
    if args.count < 1:
        _err("--count must be positive")
        return EXIT_USAGE
    stats = []
    for m in args.m:
        for n in args.n:
            if n < 2 * m:
                _err(f"skipping m={m}, n={n}: need n >= 2m")
                continue
            s = run_batch(m, n, args.count, args.seed, config, workers=args.workers)
            stats.append(s)
            print(f"m={m:4d} n={n:4d}  predictors {s.pred_mean:6.2f} +/- {s.pred_relstd:4.1f}%  "
                  f"total {s.total_mean:6.2f} +/- {s.total_relstd:4.1f}%  "
                  f"time {s.time_mean_s:.3f}s  failures {s.failures}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(emit_csv(stats))
    if not stats:
        return EXIT_USAGE
    return EXIT_NUMERICAL if any(s.failures for s in stats) else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        _config(args) if args.command != "gen" else None
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE
    handler = {"solve": _cmd_solve, "gen": _cmd_gen, "bench": _cmd_bench}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
