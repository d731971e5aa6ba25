"""Watching the predictor-corrector dynamics on one interpolation instance.

Run with ``python3 demos/02_lrqi_iterations.py [m n seed]``.
"""

import sys

import numpy as np

from dualgambit import check_solution, generate_lrqi, solve

m, n, seed = (int(v) for v in sys.argv[1:4]) if len(sys.argv) >= 4 else (64, 256, 1)
problem = generate_lrqi(m, n, seed)
print(f"m={m} n={n} seed={seed}  nu={problem.nu}")

sol = solve(problem)

# Predictor rows carry the gambit-point gap <s_hat, x_hat> and the step alpha.
# Near the end alpha -> 1 and the gap collapses by orders of magnitude.
print(f"{'k':>3} {'phase':<9} {'lambda':>8} {'t':>10} {'gap':>10} {'alpha':>9} {'bis':>4}")
for r in sol.trace:
    if r.phase == "Predictor":
        print(f"{r.k:3d} {r.phase:<9} {r.lam:8.4f} {r.t:10.3e} {r.gap:10.3e} {r.alpha:9.6f} {r.bisections:4d}")
    else:
        print(f"{r.k:3d} {r.phase:<9} {r.lam:8.4f} {r.t:10.3e}")

print("status     ", sol.status.value)
print("predictors ", sol.predictor_steps, " total", sol.iterations)
print("final gap  ", sol.gap)

# The primal matrices X1, X2 are PSD and sum to the nuclear-norm minimizer X1 - X2.
rep = check_solution(problem, sol)
print("residuals  ", rep.primal_residual, rep.dual_residual)
X = sol.x[0] - sol.x[1]
print("trace(X1+X2) =", np.trace(sol.x[0] + sol.x[1]), " <b,y> =", problem.b @ sol.y)
print("interpolation error max |a_i^T X a_i - b_i| =",
      np.max(np.abs(np.einsum("ij,jk,ik->i", problem.lrqi_vectors, X, problem.lrqi_vectors) - problem.b)))
