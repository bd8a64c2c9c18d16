"""Lattice lower bounds for the weak-type (1,1) constants of the centered cube maximal function."""

__version__ = "0.1.0"

from .measures import Cube, DeltaMeasure, LatticeWindow, axis_count, count_in_cube, mass
from .maxfun import EvalResult, candidate_radii, eval_max, eval_max_lattice, eval_max_lattice_batch
from .construction import (
    BoundCertificate,
    LevelProfile,
    assemble_certificate,
    claim4_bound,
    classify,
    f_lower,
    in_Eu,
    intersection_measure,
    ms_bound,
    optimal_s0,
    window_correction,
)
from .probability import (
    BinomialSpec,
    ClaimReport,
    binom_range_prob,
    claim1_bracket,
    claim2_factor,
    exact_Eu,
    log_binom_pmf,
    normal_tail,
    pairwise_intersection_bound,
    theorem_constant,
    u_grid,
    union_lower_bound,
)
from .estimation import McConfig, McEstimate, best_bound, estimate_Eu, estimate_superlevel, sweep_dimensions
from .oned import OneDConfig, best_lambda, functional_1d, optimize_positions, superlevel_1d
