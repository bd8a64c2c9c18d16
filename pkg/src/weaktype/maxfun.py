"""Exact evaluation of the centered cube maximal function of discrete measures.

For a point ``x`` the ratio ``nu(Q(x, r)) / (2r)^d`` is a step function of
``r`` divided by a strictly decreasing one, so its supremum over
``0 < r <= r_max`` is attained at one of the finitely many radii where the
closed cube picks up new mass.  Those *candidate radii* are the l-infinity
distances from ``x`` to support points (explicit measures) or the per-axis
distances ``|x_j - n|`` to integers (lattice measures).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import SNAP, Cube, DeltaMeasure, LatticeWindow, Measure, as_point, count_in_cube

# Upper bound on the number of float64 entries handled per chunk in the
# vectorized lattice evaluator.
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class EvalResult:
    """Value of the maximal function at one point.

    ``value`` is ``math.inf`` when a support point coincides with the query
    point; ``best_radius`` is ``None`` in that case and when no mass lies
    within ``r_max``.
    """

    value: float
    best_radius: float | None
    truncated: bool


def default_lattice_rmax(d: int) -> float:
    """``ceil(sqrt d) + 1``: the certifying cubes never need more."""
    return float(math.isqrt(d - 1) + 2)


def _dedup(sorted_vals: np.ndarray) -> np.ndarray:
    if len(sorted_vals) == 0:
        return sorted_vals
    keep = np.empty(len(sorted_vals), dtype=bool)
    keep[-1] = True
    keep[:-1] = np.diff(sorted_vals) > SNAP
    return sorted_vals[keep]


def _delta_distances(measure: DeltaMeasure, x: np.ndarray) -> np.ndarray:
    dist = np.max(np.abs(measure.points - x), axis=1)
    dist[dist <= SNAP] = 0.0
    return dist


def _lattice_axis_distances(x: np.ndarray, window: LatticeWindow, r_max: float) -> np.ndarray:
    """Distances ``|x_j - n|`` for integers ``n`` in the window, shape ``(..., d, 2K+2)``.

    Entries outside the window or beyond ``r_max`` are ``inf``; distances
    within :data:`SNAP` of zero are set to exactly zero.
    """
    K = int(math.ceil(r_max)) + 1
    offsets = np.arange(-K, K + 2, dtype=float)
    base = np.floor(x)[..., None]
    n = base + offsets
    dist = np.abs(x[..., None] - n)
    dist[dist <= SNAP] = 0.0
    bad = dist > r_max
    if not window.is_infinite:
        bad |= (n < window.lo) | (n > window.hi)
    dist[bad] = np.inf
    return dist


def candidate_radii(measure: Measure, x, r_max: float = math.inf) -> np.ndarray:
    """Ascending distinct radii in ``(0, r_max]`` at which the cube count jumps."""
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    x = as_point(x, measure.dimension)
    if isinstance(measure, LatticeWindow):
        if math.isinf(r_max):
            raise ValueError("lattice candidates need a finite r_max")
        vals = _lattice_axis_distances(x, measure, r_max).reshape(-1)
    else:
        vals = _delta_distances(measure, x)
    vals = vals[(vals > 0) & (vals <= r_max)]
    return _dedup(np.sort(vals))


def eval_max(measure: DeltaMeasure, x, r_max: float = math.inf) -> EvalResult:
    """Centered maximal function of a finite delta measure at ``x``."""
    if isinstance(measure, LatticeWindow):
        return eval_max_lattice(x, measure, r_max)
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    x = as_point(x, measure.dimension)
    d = measure.dimension
    dist = _delta_distances(measure, x)
    if np.any(dist == 0.0):
        return EvalResult(math.inf, None, False)
    inside = dist <= r_max
    truncated = not bool(np.all(inside))
    if not np.any(inside):
        return EvalResult(0.0, None, truncated)
    order = np.argsort(dist[inside], kind="stable")
    r = dist[inside][order]
    cw = np.cumsum(measure.weights[inside][order])
    ends = np.empty(len(r), dtype=bool)
    ends[-1] = True
    ends[:-1] = np.diff(r) > SNAP
    r, cw = r[ends], cw[ends]
    log_ratio = np.log(cw) - d * np.log(2.0 * r)
    i = int(np.argmax(log_ratio))
    return EvalResult(float(np.exp(log_ratio[i])), float(r[i]), truncated)


def eval_max_lattice_batch(X, window: LatticeWindow, r_max: float | None = None):
    """Vectorized lattice evaluation for a batch of points.

    Parameters
    ----------
    X : array_like, shape (N, d)
        Query points.
    window : LatticeWindow
        Bounded or unbounded integer lattice.
    r_max : float, optional
        Truncation radius; defaults to :func:`default_lattice_rmax`.

    Returns
    -------
    values, best_radii : ndarray
        ``values[i]`` is ``inf`` at lattice points and ``0`` when no lattice
        point is reachable; ``best_radii[i]`` is ``nan`` in both cases.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    N, d = X.shape
    if d != window.dimension:
        raise ValueError(f"points have dimension {d}, window has {window.dimension}")
    if r_max is None:
        r_max = default_lattice_rmax(d)
    if not (r_max > 0 and math.isfinite(r_max)):
        raise ValueError("r_max must be positive and finite")
    K = int(math.ceil(r_max)) + 1
    width = 2 * K + 2
    values = np.empty(N)
    radii = np.empty(N)
    chunk = max(1, _CHUNK_ELEMENTS // (d * width))
    # increment in log-count when an axis goes from i to i+1 points; the
    # first point on an axis only activates it
    steps = np.zeros(width)
    steps[1:] = np.log(np.arange(2, width + 1)) - np.log(np.arange(1, width))
    for start in range(0, N, chunk):
        stop = min(N, start + chunk)
        v, rr = _lattice_chunk(X[start:stop], window, r_max, steps)
        values[start:stop] = v
        radii[start:stop] = rr
    return values, radii


def _lattice_chunk(X, window, r_max, steps):
    n, d = X.shape
    dist = np.sort(_lattice_axis_distances(X, window, r_max), axis=-1)
    width = dist.shape[-1]
    inc = np.broadcast_to(steps, dist.shape).reshape(n, -1)
    act = np.zeros(dist.shape, dtype=np.int32)
    act[..., 0] = 1
    act = act.reshape(n, -1)
    flat = dist.reshape(n, d * width)
    order = np.argsort(flat, axis=1, kind="stable")
    r = np.take_along_axis(flat, order, axis=1)
    finite = np.isfinite(r)
    logc = np.cumsum(np.where(finite, np.take_along_axis(inc, order, axis=1), 0.0), axis=1)
    active = np.cumsum(np.where(finite, np.take_along_axis(act, order, axis=1), 0), axis=1)
    ends = np.ones(r.shape, dtype=bool)
    with np.errstate(invalid="ignore"):
        ends[:, :-1] = ~(r[:, 1:] - r[:, :-1] <= SNAP)
    ok = ends & finite & (r > 0) & (active == d)
    with np.errstate(divide="ignore"):
        log_ratio = np.where(ok, logc - d * np.log(2.0 * np.where(ok, r, 1.0)), -np.inf)
    best = np.argmax(log_ratio, axis=1)
    rows = np.arange(n)
    best_lr = log_ratio[rows, best]
    values = np.where(np.isfinite(best_lr), np.exp(best_lr), 0.0)
    radii = np.where(np.isfinite(best_lr), r[rows, best], np.nan)
    at_point = np.all(dist[..., 0] == 0.0, axis=1)
    values[at_point] = np.inf
    radii[at_point] = np.nan
    return values, radii


def eval_max_lattice(x, window: LatticeWindow, r_max: float | None = None) -> EvalResult:
    """Maximal function of the (restricted) integer lattice at one point."""
    x = as_point(x, window.dimension)
    if r_max is None:
        r_max = default_lattice_rmax(window.dimension)
    values, radii = eval_max_lattice_batch(x[None, :], window, r_max)
    v, r = float(values[0]), float(radii[0])
    truncated = window.is_infinite or bool(
        np.any(np.maximum(np.abs(x - window.lo), np.abs(x - window.hi)) > r_max)
    )
    return EvalResult(v, None if math.isnan(r) else r, truncated)


def eval_max_dense_oracle(measure: Measure, x, r_max: float, steps: int = 1000) -> float:
    """Brute-force lower estimate of the maximal function (test oracle).

    Scans a uniform radius grid together with all candidate radii, counting
    mass directly with :func:`count_in_cube`.
    """
    if steps < 1000:
        raise ValueError("steps must be at least 1000")
    x = as_point(x, measure.dimension)
    grid = r_max * np.arange(1, steps + 1) / steps
    radii = np.concatenate([grid, candidate_radii(measure, x, r_max)])
    d = measure.dimension
    best = 0.0
    for r in radii:
        c = count_in_cube(measure, Cube(x, float(r)))
        if c:
            best = max(best, c / (2.0 * r) ** d)
    return best
