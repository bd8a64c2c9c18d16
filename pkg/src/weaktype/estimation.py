"""Monte Carlo estimates of superlevel sets of the lattice maximal function.

The lattice is invariant under integer translations, so the measure of
``{M mu >= alpha}`` per unit of mass is the probability that a uniform point
of the unit cell lands in it.  Samples are drawn in fixed-size blocks, each
from its own counter-based stream, so results never depend on how blocks
are spread over workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .construction import LevelProfile, k_in_band, ms_bound, off_center_mask, window_correction
from .maxfun import default_lattice_rmax, eval_max_lattice_batch
from .measures import LatticeWindow
from .rng import derive_seed, stream_generator

log = logging.getLogger(__name__)

BLOCK = 8192
Z99 = 2.5758293035489004
CSV_COLUMNS = ("d", "alpha", "p_hat", "std_err", "value", "ci_lo", "ci_hi",
               "r_max", "N", "seed", "ms_bound")


def default_alpha_grid(t: float = 2.0, points: int = 64) -> tuple:
    """Geometric grid from 0.5 to ``e^{t^2/2}``."""
    return tuple(float(a) for a in np.geomspace(0.5, math.exp(t * t / 2.0), points))


@dataclass(frozen=True)
class McConfig:
    samples: int = 100_000
    seed: int = 20240601
    r_max: float | None = None
    alpha_grid: tuple = field(default_factory=default_alpha_grid)
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        grid = tuple(float(a) for a in self.alpha_grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] <= 0:
            raise ValueError("alpha_grid must be nonempty, positive and strictly increasing")
        object.__setattr__(self, "alpha_grid", grid)

    def rmax_for(self, d: int) -> float:
        return default_lattice_rmax(d) if self.r_max is None else float(self.r_max)


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    std_err: float
    N: int
    alpha: float | None = None

    @classmethod
    def from_count(cls, hits: int, N: int, alpha: float | None = None) -> "McEstimate":
        p = hits / N
        return cls(p, math.sqrt(p * (1.0 - p) / N), N, alpha)

    def z_score(self, p_true: float) -> float:
        if self.std_err == 0:
            return 0.0 if self.p_hat == p_true else math.inf
        return abs(self.p_hat - p_true) / self.std_err


def binomial_ci(p_hat: float, N: int, z: float = Z99) -> tuple[float, float]:
    """Normal-approximation interval, Wilson score interval when ``p_hat N < 10``."""
    if p_hat * N < 10:
        denom = 1.0 + z * z / N
        center = (p_hat + z * z / (2 * N)) / denom
        half = z * math.sqrt(p_hat * (1 - p_hat) / N + z * z / (4 * N * N)) / denom
    else:
        center = p_hat
        half = z * math.sqrt(p_hat * (1 - p_hat) / N)
    return max(0.0, center - half), min(1.0, center + half)


def _blocks(N: int):
    return [(b, min(BLOCK, N - b * BLOCK)) for b in range((N + BLOCK - 1) // BLOCK)]


def sample_block(seed: int, block: int, size: int, d: int) -> np.ndarray:
    """Uniform points of the unit cell for one block (53-bit uniforms)."""
    return stream_generator(seed, block).random((size, d))


def _max_block(args):
    seed, block, size, d, r_max = args
    X = sample_block(seed, block, size, d)
    values, _ = eval_max_lattice_batch(X, LatticeWindow.infinite(d), r_max)
    return values


def _run_blocks(fn, jobs, workers: int):
    if workers == 1 or len(jobs) == 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


def sample_max_values(d: int, config: McConfig) -> np.ndarray:
    """Lattice maximal function at the ``config.samples`` sample points, in order."""
    r_max = config.rmax_for(d)
    jobs = [(config.seed, b, n, d, r_max) for b, n in _blocks(config.samples)]
    return np.concatenate(_run_blocks(_max_block, jobs, config.workers))


def estimate_superlevel(d: int, alpha: float, config: McConfig) -> McEstimate:
    """Fraction of the unit cell where the truncated lattice maximal function is ``>= alpha``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    values = sample_max_values(d, config)
    return McEstimate.from_count(int(np.count_nonzero(values >= alpha)), len(values), alpha)


@dataclass(frozen=True)
class BestBound:
    d: int
    alpha: float
    value: float
    ci: tuple
    p_hat: float
    std_err: float
    N: int
    r_max: float
    seed: int
    certified: dict = field(default_factory=dict)
    degenerate: bool = False

    @property
    def value_se(self) -> float:
        return self.alpha * self.std_err

    def to_row(self) -> dict:
        return {
            "d": self.d, "alpha": self.alpha, "p_hat": self.p_hat,
            "std_err": self.std_err, "value": self.value,
            "ci_lo": self.ci[0], "ci_hi": self.ci[1], "r_max": self.r_max,
            "N": self.N, "seed": self.seed, "ms_bound": ms_bound(self.d),
        }


def best_bound_from_values(d: int, values: np.ndarray, config: McConfig,
                           R_list=()) -> BestBound:
    N = len(values)
    grid = np.asarray(config.alpha_grid)
    hits = np.count_nonzero(values[None, :] >= grid[:, None], axis=1)
    scores = grid * hits / N
    i = int(np.argmax(scores))
    est = McEstimate.from_count(int(hits[i]), N, float(grid[i]))
    lo, hi = binomial_ci(est.p_hat, N)
    alpha = float(grid[i])
    degenerate = bool(hits[i] == 0)
    if degenerate:
        log.warning("no sample reached any threshold in the grid (d=%d)", d)
    certified = {int(R): alpha * est.p_hat * window_correction(d, int(R)) for R in R_list}
    return BestBound(d, alpha, float(scores[i]), (alpha * lo, alpha * hi), est.p_hat,
                     est.std_err, N, config.rmax_for(d), config.seed, certified, degenerate)


def best_bound(d: int, config: McConfig, R_list=()) -> BestBound:
    """Best threshold on the grid for ``alpha * P(M >= alpha)`` with a 99% band.

    ``certified`` maps each requested window size ``R`` to the finite-measure
    form ``alpha * p_hat * window_correction(d, R)``.
    """
    return best_bound_from_values(d, sample_max_values(d, config), config, R_list)


def _eu_block(args):
    seed, block, size, d, u, t = args
    X = sample_block(seed, block, size, d)
    k = np.count_nonzero(off_center_mask(X, u), axis=1)
    return int(np.count_nonzero(k_in_band(k, LevelProfile(u, t, d))))


def estimate_Eu(d: int, u: float, t: float, config: McConfig) -> McEstimate:
    """Monte Carlo frequency of the band set at level ``u``."""
    jobs = [(config.seed, b, n, d, u, t) for b, n in _blocks(config.samples)]
    hits = sum(_run_blocks(_eu_block, jobs, config.workers))
    return McEstimate.from_count(hits, config.samples)


def _pair_block(args):
    seed, block, size, d, u, v, K, M = args
    X = sample_block(seed, block, size, d)
    want_u = np.zeros(d, dtype=bool)
    want_u[list(K)] = True
    want_v = np.zeros(d, dtype=bool)
    want_v[list(M)] = True
    ok = np.all(off_center_mask(X, u) == want_u, axis=1) & np.all(off_center_mask(X, v) == want_v, axis=1)
    return int(np.count_nonzero(ok))


def estimate_intersection(d: int, u: float, v: float, K, M, config: McConfig) -> McEstimate:
    """Frequency of points off center at level ``u`` exactly on ``K`` and at ``v`` exactly on ``M``."""
    K, M = sorted(set(K)), sorted(set(M))
    if not set(M) <= set(K):
        raise ValueError("M must be a subset of K")
    jobs = [(config.seed, b, n, d, u, v, tuple(K), tuple(M)) for b, n in _blocks(config.samples)]
    hits = sum(_run_blocks(_pair_block, jobs, config.workers))
    return McEstimate.from_count(hits, config.samples)


def sweep_dimensions(d_list, config: McConfig, R_list=()) -> list[BestBound]:
    """One :func:`best_bound` row per dimension, each with a seed derived from ``(seed, d)``."""
    d_list = list(d_list)
    if not d_list:
        raise ValueError("d_list must be nonempty")
    rows = []
    for d in d_list:
        sub = replace(config, seed=derive_seed(config.seed, d))
        rows.append(best_bound(d, sub, R_list))
    return rows


def _union_block(args):
    seed, block, size, d, levels, t = args
    X = sample_block(seed, block, size, d)
    hit = np.zeros(size, dtype=bool)
    for u in levels:
        k = np.count_nonzero(off_center_mask(X, u), axis=1)
        hit |= k_in_band(k, LevelProfile(u, t, d))
    return int(np.count_nonzero(hit))


def estimate_union(d: int, levels, t: float, config: McConfig) -> McEstimate:
    """Monte Carlo frequency of the union of band sets over ``levels``."""
    jobs = [(config.seed, b, n, d, tuple(levels), t) for b, n in _blocks(config.samples)]
    hits = sum(_run_blocks(_union_block, jobs, config.workers))
    return McEstimate.from_count(hits, config.samples)
