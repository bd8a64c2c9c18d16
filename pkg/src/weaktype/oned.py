"""Exact one-dimensional weak-type functional for finite delta configurations.

For unit deltas at ``p_1 < ... < p_n`` the superlevel set ``{M nu >= lam}``
is the union, over index pairs ``i <= j``, of the centers whose cube
reaches exactly from ``p_i`` to ``p_j`` with ratio at least ``lam``::

    [p_j - m / (2 lam), p_i + m / (2 lam)],    m = j - i + 1.

Every endpoint is affine in ``1 / (2 lam)``, so ``lam * |{M nu >= lam}|`` is
piecewise linear in ``lam`` and its supremum is attained where two endpoints
meet.  :func:`best_lambda` exploits this to refine exactly.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .rng import stream_generator

# Best known value (11 + sqrt 61) / 12 for d = 1; no configuration may exceed it.
C1_EXACT = (11.0 + math.sqrt(61.0)) / 12.0
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class OneDConfig:
    """Strictly increasing positions of unit deltas on the line."""

    positions: tuple
    provenance: str = ""

    def __post_init__(self):
        p = tuple(float(v) for v in self.positions)
        if not p:
            raise ValueError("at least one delta is required")
        if not all(math.isfinite(v) for v in p):
            raise ValueError("positions must be finite")
        if any(b <= a for a, b in zip(p, p[1:])):
            raise ValueError("positions must be strictly increasing")
        object.__setattr__(self, "positions", p)

    @property
    def n(self) -> int:
        return len(self.positions)

    def to_json(self) -> dict:
        return {"positions": list(self.positions), "provenance": self.provenance}

    @classmethod
    def from_json(cls, obj: dict) -> "OneDConfig":
        return cls(tuple(obj["positions"]), obj.get("provenance", ""))

    @classmethod
    def load(cls, path) -> "OneDConfig":
        return cls.from_json(json.loads(Path(path).read_text()))


def best_known_config(n: int = 16) -> OneDConfig:
    """Best configuration found by :func:`optimize_positions`, shipped as a fixture."""
    path = resources.files("weaktype").joinpath("data", f"oned_n{n}_best.json")
    if not path.is_file():
        raise ValueError(f"no stored configuration for n={n}")
    return OneDConfig.from_json(json.loads(path.read_text()))


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise disjoint closed intervals."""

    intervals: tuple = field(default_factory=tuple)

    @property
    def total_length(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    @classmethod
    def normalize(cls, intervals) -> "IntervalUnion":
        merged: list[list[float]] = []
        for a, b in sorted((float(a), float(b)) for a, b in intervals if b >= a):
            if merged and a <= merged[-1][1] + MERGE_TOL:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))


def _pairs(p: np.ndarray):
    i, j = np.triu_indices(len(p))
    return p[i], p[j], (j - i + 1).astype(float)


def superlevel_1d(config: OneDConfig, lam: float) -> IntervalUnion:
    """The set ``{x : M nu(x) >= lam}`` as a normalized interval union."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    pi, pj, m = _pairs(np.asarray(config.positions))
    half = m / (2.0 * lam)
    left, right = pj - half, pi + half
    keep = left <= right
    return IntervalUnion.normalize(zip(left[keep], right[keep]))


def _union_lengths(p: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """Total superlevel length for each threshold in ``lams`` (vectorized)."""
    pi, pj, m = _pairs(p)
    mu = 1.0 / (2.0 * np.asarray(lams, dtype=float))[:, None]
    left = pj - m * mu
    right = np.maximum(pi + m * mu, left)
    order = np.argsort(left, axis=1)
    left = np.take_along_axis(left, order, axis=1)
    right = np.take_along_axis(right, order, axis=1)
    reach = np.maximum.accumulate(right, axis=1)
    prev = np.empty_like(reach)
    prev[:, 0] = -np.inf
    prev[:, 1:] = reach[:, :-1]
    return np.sum(np.maximum(0.0, right - np.maximum(left, prev)), axis=1)


def functional_1d(config: OneDConfig, lam: float) -> float:
    """``lam * |{M nu >= lam}| / n``, a lower bound for the constant in d = 1."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return lam * superlevel_1d(config, lam).total_length / config.n


def _functional_many(p: np.ndarray, lams: np.ndarray) -> np.ndarray:
    return lams * _union_lengths(p, lams) / len(p)


def _endpoint_table(p: np.ndarray):
    """Distinct endpoint lines ``c + s * mu`` of the pair intervals."""
    n = len(p)
    cs, ss = [], []
    for k in range(n):
        # left ends p_k - m mu (m = 1..k+1), right ends p_k + m mu (m = 1..n-k)
        for m in range(1, k + 2):
            cs.append(p[k])
            ss.append(-m)
        for m in range(1, n - k + 1):
            cs.append(p[k])
            ss.append(m)
    return np.array(cs), np.array(ss, dtype=float)


def breakpoints(config: OneDConfig, lam_lo: float = 0.0, lam_hi: float = math.inf) -> np.ndarray:
    """Thresholds in ``[lam_lo, lam_hi]`` where two interval endpoints meet."""
    p = np.asarray(config.positions)
    c, s = _endpoint_table(p)
    i, j = np.triu_indices(len(c), k=1)
    ds = s[i] - s[j]
    ok = ds != 0
    mu = (c[j][ok] - c[i][ok]) / ds[ok]
    mu = mu[mu > 0]
    lam = 1.0 / (2.0 * mu)
    lam = lam[(lam >= lam_lo) & (lam <= lam_hi)]
    return np.unique(lam)


def best_lambda(config: OneDConfig, refinement_budget: int = 4096) -> tuple[float, float]:
    """Best threshold found for ``config`` and its functional value.

    A coarse pass evaluates every threshold where a pair interval vanishes;
    the bracket around the best of those is then refined exactly by
    evaluating all endpoint-crossing thresholds inside it (at most
    ``refinement_budget`` of them, evenly thinned otherwise).
    """
    if refinement_budget < 1:
        raise ValueError("refinement budget must be at least 1")
    p = np.asarray(config.positions)
    if len(p) == 1:
        return 1.0, 1.0
    pi, pj, m = _pairs(p)
    gaps = pj - pi
    coarse = np.unique(m[gaps > 0] / gaps[gaps > 0])
    vals = _functional_many(p, coarse)
    k = int(np.argmax(vals))
    best_lam, best_val = float(coarse[k]), float(vals[k])
    lo = coarse[k - 1] if k > 0 else 0.5 * coarse[0]
    hi = coarse[k + 1] if k + 1 < len(coarse) else 2.0 * coarse[-1]
    fine = breakpoints(config, lo, hi)
    if len(fine) > refinement_budget:
        fine = fine[np.linspace(0, len(fine) - 1, refinement_budget).astype(int)]
    if len(fine):
        fvals = _functional_many(p, fine)
        j = int(np.argmax(fvals))
        if fvals[j] > best_val:
            best_lam, best_val = float(fine[j]), float(fvals[j])
    return best_lam, best_val


def exact_best_lambda(config: OneDConfig, chunk: int = 2048) -> tuple[float, float]:
    """Global maximum of the functional over all thresholds (all breakpoints)."""
    p = np.asarray(config.positions)
    if len(p) == 1:
        return 1.0, 1.0
    lams = breakpoints(config)
    best_lam, best_val = 1.0, 1.0
    for s in range(0, len(lams), chunk):
        part = lams[s:s + chunk]
        vals = _functional_many(p, part)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_lam, best_val = float(part[j]), float(vals[j])
    return best_lam, best_val


@dataclass(frozen=True)
class SearchResult:
    config: OneDConfig
    value: float
    lam: float
    restart: int
    trace: tuple = ()


def _objective(p: np.ndarray, budget: int) -> tuple[float, float]:
    if np.any(np.diff(p) <= 0):
        return -math.inf, math.nan
    lam, val = best_lambda(OneDConfig(tuple(p)), budget)
    return val, lam


def _restart(args) -> SearchResult:
    n, iterations, seed, restart, budget = args
    rng = stream_generator(seed, restart)
    p = np.arange(n, dtype=float)
    if restart > 0:
        p = np.sort(p + rng.uniform(-0.3, 0.3, n))
    value, lam = _objective(p, budget)
    step = (p[-1] - p[0]) / n
    stale = 0
    trace = [(0, value, step)]
    for it in range(1, iterations + 1):
        i = int(rng.integers(n)) if restart > 0 else (it - 1) % n
        improved = False
        for sign in (1.0, -1.0):
            q = p.copy()
            q[i] += sign * step
            q.sort()
            v, l = _objective(q, budget)
            if v > value:
                p, value, lam, improved = q, v, l, True
                break
        if improved:
            stale = 0
        else:
            stale += 1
            if stale >= 50:
                step *= 0.5
                stale = 0
        trace.append((it, value, step))
    config = OneDConfig(tuple(p - p[0]), provenance=f"optimize_positions seed={seed} restart={restart}")
    return SearchResult(config, value, lam, restart, tuple(trace))


def optimize_positions(n: int, iterations: int = 400, restarts: int = 20, seed: int = 0,
                       workers: int = 1, refinement_budget: int = 4096) -> SearchResult:
    """Multi-start coordinate search over delta positions maximizing :func:`best_lambda`.

    Restart 0 starts from ``0, 1, ..., n-1`` and sweeps coordinates
    cyclically; the others start from jittered copies and pick coordinates
    from their own random stream.  The step starts at ``span / n`` and halves
    after 50 consecutive non-improving iterations.  The best restart wins,
    ties going to the lowest index.
    """
    if n < 2:
        raise ValueError("need at least two deltas")
    jobs = [(n, iterations, seed, r, refinement_budget) for r in range(restarts)]
    if workers == 1:
        results = [_restart(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_restart, jobs))
    best = results[0]
    for r in results[1:]:
        if r.value > best.value:
            best = r
    return best
