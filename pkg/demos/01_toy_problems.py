"""Solving small conic problems by hand-building them.

Run with ``python3 demos/01_toy_problems.py``.
"""

import numpy as np

from dualgambit import ConeSpec, ConeVec, ConicProblem, Dense, Lorentz, Orthant, Psd, RankOne, solve

# A two-variable LP: min x1 + x2 subject to x1 + x2 = 1, x >= 0.
lp = ConicProblem(
    cone=ConeSpec([Orthant(2)]),
    rows=[{0: Dense(np.array([1.0, 1.0]))}],
    b=[1.0],
    c=ConeVec([np.ones(2)]),
    y_start=[0.0],  # s = c - A*y = (1, 1) is interior
)
sol = solve(lp)
print("LP      ", sol.status.value, "objective", lp.c.dot(sol.x), "dual", lp.b @ sol.y)

# A second-order cone: minimize <c, x> over the slice x0 = 1 of the Lorentz cone.
# The optimum is 1 - |(0.2, 0.1)|.
soc = ConicProblem(ConeSpec([Lorentz(3)]), [{0: Dense(np.array([1.0, 0.0, 0.0]))}], [1.0],
                   ConeVec([np.array([1.0, 0.2, 0.1])]), [0.0])
sol = solve(soc)
print("SOC     ", sol.status.value, "objective", soc.c.dot(sol.x), "expected", 1 - np.hypot(0.2, 0.1))

# Trace minimization with one rank-one constraint <X a, a> = 1 and |a| = 1.
# X* = a a^T, so the optimum is 1.
a = np.array([3.0, 4.0, 0.0]) / 5.0
rank_one = ConicProblem(ConeSpec([Psd(3)]), [{0: RankOne(1, a)}], [1.0], ConeVec([np.eye(3)]), [0.0])
sol = solve(rank_one)
print("rank-one", sol.status.value, "objective", rank_one.c.dot(sol.x))
print("X* =\n", np.round(sol.x[0], 6))

# The trace records what every iteration did.
for r in sol.trace:
    print(r)
