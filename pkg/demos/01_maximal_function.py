#=========================================================================
# 01_maximal_function.py
#=========================================================================
# Evaluating the centered cube maximal function of point masses and of the
# integer lattice, and checking the exact evaluator against a dense scan.

import numpy as np

from weaktype import DeltaMeasure, LatticeWindow, eval_max, eval_max_lattice
from weaktype.maxfun import candidate_radii, eval_max_dense_oracle

#-------------------------------------------------------------------------
# A single point mass
#-------------------------------------------------------------------------
# The ratio mass / volume of the cube of radius r around x = 0.25 is
# 1 / (2r) once the cube reaches the origin, so the sup is at r = 0.25.

one = DeltaMeasure(1, [[0.0]])
res = eval_max(one, [0.25])
print("single delta:", res.value, "at r =", res.best_radius)

#-------------------------------------------------------------------------
# Candidate radii
#-------------------------------------------------------------------------
# Counts only jump at the l-infinity distances to the support, and the
# volume factor decreases in between, so those distances are the only
# radii worth looking at.

lat = LatticeWindow.infinite(1)
print("lattice radii near x = 0.3:", candidate_radii(lat, [0.3], 1.5))

#-------------------------------------------------------------------------
# Exact vs dense scan
#-------------------------------------------------------------------------

rng = np.random.default_rng(0)
m = DeltaMeasure(2, rng.uniform(-1, 1, (6, 2)))
x = rng.uniform(-1, 1, 2)
print("exact:", eval_max(m, x, 3.0).value)
print("scan: ", eval_max_dense_oracle(m, x, 3.0, steps=5000))

#-------------------------------------------------------------------------
# The lattice in a few dimensions
#-------------------------------------------------------------------------
# At the center of the unit cell the cube of radius 1/2 holds 2^d points
# and has volume 1.

for d in (1, 2, 3, 5):
    r = eval_max_lattice(np.full(d, 0.5), LatticeWindow.infinite(d))
    print(f"d={d}: M(center) = {r.value:g} at r = {r.best_radius:g}")
