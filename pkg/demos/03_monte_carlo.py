#=========================================================================
# 03_monte_carlo.py
#=========================================================================
# Monte Carlo lower bounds alpha * P(M >= alpha) for the lattice, next to
# the closed-form bound ((1 + 2^(1/d)) / 2)^d.

from weaktype import McConfig, best_bound, ms_bound

config = McConfig(samples=50_000, seed=1)

for d in (1, 2, 3, 5, 8):
    bb = best_bound(d, config)
    print(f"d={d}: alpha*={bb.alpha:7.3f}  value={bb.value:.4f} "
          f"[{bb.ci[0]:.4f}, {bb.ci[1]:.4f}]  closed form {ms_bound(d):.4f}")

#-------------------------------------------------------------------------
# Finite windows
#-------------------------------------------------------------------------
# Restricting the lattice to a box of side R costs the factor
# (R / (R + 2 sqrt d + 1))^d; small boxes lose most of the bound.

bb = best_bound(5, config, R_list=(50, 1000, 100000))
for R, v in bb.certified.items():
    print(f"R={R:6d}: {v:.4f}")
