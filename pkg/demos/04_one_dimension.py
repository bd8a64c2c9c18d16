#=========================================================================
# 04_one_dimension.py
#=========================================================================
# The weak-type functional for finitely many unit deltas on the line,
# computed exactly, and a search over their positions.

import numpy as np

from weaktype import OneDConfig, functional_1d, optimize_positions, superlevel_1d
from weaktype.oned import C1_EXACT, best_known_config, exact_best_lambda

#-------------------------------------------------------------------------
# Equal spacing
#-------------------------------------------------------------------------
# n equally spaced deltas give (3n - 1) / (2n) at lambda = 3/2: the
# superlevel set is the hull of the points plus 1/3 on each side.

for n in (2, 4, 8, 16, 64):
    lam, v = exact_best_lambda(OneDConfig(tuple(range(n))))
    print(f"n={n:3d}: best lambda {lam:.4f}, value {v:.6f}, (3n-1)/(2n) = {(3 * n - 1) / (2 * n):.6f}")

c = OneDConfig((0.0, 1.0, 2.0))
print("superlevel at 3/2:", superlevel_1d(c, 1.5).intervals)

#-------------------------------------------------------------------------
# The functional is piecewise linear in lambda
#-------------------------------------------------------------------------

rng = np.random.default_rng(3)
c = OneDConfig(tuple(np.sort(rng.uniform(0, 5, 6))))
lams = np.linspace(0.5, 3, 11)
print(np.round([functional_1d(c, l) for l in lams], 4))

#-------------------------------------------------------------------------
# Searching positions
#-------------------------------------------------------------------------
# A short search; the full default run is `weaktype oned-search --n 16`.

res = optimize_positions(8, iterations=150, restarts=4, seed=2)
print(f"n=8 search: {res.value:.6f} (restart {res.restart}), ceiling {C1_EXACT:.5f}")
print("stored n=16 configuration:", exact_best_lambda(best_known_config(16)))
