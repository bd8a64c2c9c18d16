"""Geometry of the lattice lower-bound construction.

A coordinate ``x_j`` of a point in the unit cube is *centered at level u*
when it lies in ``[u/2, 1 - u/2]`` and off center otherwise.  Points whose
number ``k`` of off-center coordinates falls in the band

    u d - (t + 1/t) sigma_u sqrt(d)  <  k  <=  u d - t sigma_u sqrt(d)

form the band set at level ``u``; on it the lattice maximal function is
large because cubes of radius ``s - u/2`` centered there lose at most one
lattice point per off-center axis.

Axis indices are 0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

PROVENANCE_TAGS = ("exact-binomial", "monte-carlo", "closed-form")


@dataclass(frozen=True)
class LevelProfile:
    """Level ``u``, deviation parameter ``t`` and dimension ``d`` with derived quantities."""

    u: float
    t: float
    d: int

    def __post_init__(self):
        if not 0.0 < self.u < 1.0:
            raise ValueError("level u must lie in (0, 1)")
        if not self.t > 0:
            raise ValueError("t must be positive")
        if self.d < 1 or int(self.d) != self.d:
            raise ValueError("d must be a positive integer")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.u * (1.0 - self.u))

    @property
    def r0(self) -> float:
        """Upper end of the band: ``u d - t sigma sqrt(d)``."""
        return self.u * self.d - self.t * self.sigma * math.sqrt(self.d)

    @property
    def k_lo(self) -> float:
        """Open lower end of the band: ``u d - (t + 1/t) sigma sqrt(d)``."""
        return self.u * self.d - (self.t + 1.0 / self.t) * self.sigma * math.sqrt(self.d)

    @property
    def s0(self) -> float:
        return optimal_s0(self)

    @property
    def default_s_cap(self) -> int:
        return max(3, math.ceil(2.0 * self.s0))


@dataclass(frozen=True)
class CoordinateClassification:
    off_center: frozenset
    k: int


def _check_unit(x: np.ndarray):
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("coordinates must lie in [0, 1]")


def off_center_mask(X, u: float) -> np.ndarray:
    """Boolean mask of off-center coordinates, ``x < u/2`` or ``x > 1 - u/2``."""
    X = np.asarray(X, dtype=float)
    _check_unit(X)
    return (X < 0.5 * u) | (X > 1.0 - 0.5 * u)


def classify(x, u: float) -> CoordinateClassification:
    if not 0.0 < u < 1.0:
        raise ValueError("level u must lie in (0, 1)")
    mask = off_center_mask(np.atleast_1d(x), u)
    idx = frozenset(int(j) for j in np.flatnonzero(mask))
    return CoordinateClassification(idx, len(idx))


def k_in_band(k, profile: LevelProfile):
    """Whether off-center counts ``k`` lie in the band (works on arrays)."""
    return (k > profile.k_lo) & (k <= profile.r0)


def in_Eu(x, profile: LevelProfile) -> bool:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (profile.d,):
        raise ValueError("point dimension does not match the profile")
    return bool(k_in_band(classify(x, profile.u).k, profile))


def log_f_lower(u: float, d: int, r: int, s) -> np.ndarray | float:
    """Logarithm of :func:`f_lower`; ``s`` may be an array."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 1):
        raise ValueError("s must be a positive integer")
    return r * np.log1p(-1.0 / (2.0 * s)) - d * np.log1p(-u / (2.0 * s))


def f_lower(u: float, d: int, r: int, s: int) -> float:
    """``(1 - 1/(2s))^r / (1 - u/(2s))^d``: the count-to-volume ratio of the cube
    of radius ``s - u/2`` around a point with ``r`` off-center coordinates."""
    if not 0 <= r <= d:
        raise ValueError("need 0 <= r <= d")
    if not 0.0 < u < 1.0:
        raise ValueError("level u must lie in (0, 1)")
    return float(np.exp(log_f_lower(u, d, r, s)))


def optimal_s0(profile: LevelProfile) -> float:
    """Real maximizer ``u (d - r0) / (2 (u d - r0))`` of the pointwise bound."""
    gap = profile.u * profile.d - profile.r0
    if gap <= 0:
        raise ValueError("u d - r0 must be positive")
    return profile.u * (profile.d - profile.r0) / (2.0 * gap)


def claim4_bound(x, profile: LevelProfile, s_cap: int | None = None) -> tuple[float, int]:
    """Best certified lower bound on the lattice maximal function at ``x``.

    Maximizes :func:`f_lower` over integer ``s`` in ``[1, s_cap]`` with ``r``
    the number of off-center coordinates of ``x``.
    """
    r = classify(x, profile.u).k
    return claim4_bound_from_count(r, profile, s_cap)


def claim4_bound_from_count(r: int, profile: LevelProfile, s_cap: int | None = None):
    if s_cap is None:
        s_cap = profile.default_s_cap
    s = np.arange(1, s_cap + 1)
    logs = log_f_lower(profile.u, profile.d, r, s)
    i = int(np.argmax(logs))
    return float(np.exp(logs[i])), int(s[i])


def claim4_threshold(profile: LevelProfile, s_cap: int | None = None) -> float:
    """Value the lattice maximal function is certified to reach on the whole band set.

    ``f_lower`` decreases in ``r``, so the worst point of the band has
    ``floor(r0)`` off-center coordinates.
    """
    r = max(0, math.floor(profile.r0))
    return claim4_bound_from_count(r, profile, s_cap)[0]


def intersection_measure(u: float, v: float, d: int, k: int, m: int) -> float:
    """Volume ``v^m (u - v)^(k - m) (1 - u)^(d - k)`` of the set of points
    off center at level ``v`` exactly on a fixed ``m``-set and at level ``u``
    exactly on a fixed ``k``-superset of it."""
    if not 0.0 < v < u < 1.0:
        raise ValueError("levels must satisfy 0 < v < u < 1")
    if not 0 <= m <= k <= d:
        raise ValueError("need 0 <= m <= k <= d")
    return math.exp(m * math.log(v) + (k - m) * math.log(u - v) + (d - k) * math.log1p(-u))


def window_correction(d: int, R: int | None) -> float:
    """``(R / (R + 2 sqrt d + 1))^d``; ``R=None`` is the ``R -> inf`` limit."""
    if R is None:
        return 1.0
    if R < 1:
        raise ValueError("R must be at least 1")
    return math.exp(d * math.log(R / (R + 2.0 * math.sqrt(d) + 1.0)))


def ms_bound(d: int) -> float:
    """Closed-form lattice lower bound ``((1 + 2^{1/d}) / 2)^d``."""
    if d < 1:
        raise ValueError("d must be positive")
    return math.exp(d * math.log((1.0 + 2.0 ** (1.0 / d)) / 2.0))


@dataclass(frozen=True)
class BoundCertificate:
    """Lower bound ``alpha * superlevel_lower * window_factor`` on the weak-type constant."""

    d: int
    alpha: float
    superlevel_lower: float
    window_factor: float
    bound: float
    R: int | None
    mass_per_cell: float = 1.0
    provenance: dict = field(default_factory=dict)

    @property
    def asymptotic(self) -> bool:
        return self.R is None

    def to_json(self) -> dict:
        out = asdict(self)
        out["asymptotic"] = self.asymptotic
        return out


def assemble_certificate(d: int, alpha: float, superlevel_lower: float,
                         R: int | None = None, provenance: dict | None = None) -> BoundCertificate:
    if alpha < 0 or superlevel_lower < 0:
        raise ValueError("certificate factors must be nonnegative")
    provenance = dict(provenance or {})
    provenance.setdefault("window_factor", "closed-form")
    for key, tag in provenance.items():
        if tag not in PROVENANCE_TAGS:
            raise ValueError(f"unknown provenance tag {tag!r} for {key}")
    w = window_correction(d, R)
    return BoundCertificate(
        d=d, alpha=alpha, superlevel_lower=superlevel_lower, window_factor=w,
        bound=alpha * superlevel_lower * w, R=R, provenance=provenance,
    )
