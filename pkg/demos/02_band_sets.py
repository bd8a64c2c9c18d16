#=========================================================================
# 02_band_sets.py
#=========================================================================
# Exact binomial computations for the band sets E^u: their measure against
# the closed-form brackets, the pairwise intersections and the union.

import math

from weaktype import LevelProfile, exact_Eu
from weaktype import probability as prob
from weaktype.construction import claim4_threshold

u = 0.125

#-------------------------------------------------------------------------
# |E^u| against its bracket
#-------------------------------------------------------------------------

for t in (2.0, 3.0):
    lo, hi = prob.claim1_bracket(t)
    print(f"t={t:g}: bracket ({lo:.3e}, {hi:.3e})")
    for d in prob.d_schedule(1000, 64000, 4):
        print(f"   d={d:6d}  |E^u| = {exact_Eu(LevelProfile(u, t, d)):.4e}")

#-------------------------------------------------------------------------
# Pairwise intersections
#-------------------------------------------------------------------------
# Levels a distance t^(-4/3) apart only make sense once t^(-4/3) < u, so
# the pair below uses t = 5.

t = 5.0
v = 0.25 - t ** (-4 / 3)
for d in (1000, 10000, 100000):
    pair = prob.pairwise_intersection_bound(d, 0.25, v, t)
    cap = prob.claim2_factor(t) * exact_Eu(LevelProfile(0.25, t, d))
    print(f"d={d:6d}  |E^u n E^v| <= {pair:.3e}   cap {cap:.3e}")

#-------------------------------------------------------------------------
# Union and the certified maximal-function level
#-------------------------------------------------------------------------

d, t = 100000, 3.0
ub = prob.union_lower_bound(d, t)
alpha = min(claim4_threshold(LevelProfile(w, t, d)) for w in ub.levels)
print(f"union >= {ub.lower:.4e}  (floor {ub.closed_form_floor:.4e})")
print(f"M >= {alpha:.3f} there, e^(t^2/2)/2 = {math.exp(t * t / 2) / 2:.3f}")
print(f"alpha * union = {alpha * ub.lower:.3e}")
