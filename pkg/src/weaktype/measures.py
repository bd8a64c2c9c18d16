"""Discrete measures and mass counting inside closed l-infinity cubes.

Two representations are supported: an explicit list of weighted point
masses (:class:`DeltaMeasure`) and the implicit integer lattice, either
unbounded or restricted to a box ``[lo, hi]^d`` (:class:`LatticeWindow`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

# Distances closer than this to an integer are snapped before rounding, so
# that closed-cube boundaries survive floating-point roundoff.
SNAP = 2.0 ** -40


def _snap(v: float) -> float:
    n = round(v)
    return float(n) if abs(v - n) <= SNAP else v


@dataclass(frozen=True)
class DeltaMeasure:
    """Finite sum of weighted Dirac deltas in ``dimension`` dimensions."""

    dimension: int
    points: np.ndarray
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if self.dimension == 1 else pts.reshape(1, -1)
        if pts.shape[1] != self.dimension:
            raise ValueError(
                f"points have dimension {pts.shape[1]}, expected {self.dimension}"
            )
        if self.weights is None:
            w = np.ones(len(pts))
        else:
            w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(w) != len(pts):
            raise ValueError("one weight per point required")
        if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and strictly positive")
        if not np.all(np.isfinite(pts)):
            raise ValueError("coordinates must be finite")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "points": [
                {"x": [float(c) for c in p], "w": float(w)}
                for p, w in zip(self.points, self.weights)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DeltaMeasure":
        d = int(obj["dimension"])
        pts = [p["x"] for p in obj["points"]]
        w = [p.get("w", 1.0) for p in obj["points"]]
        return cls(d, np.array(pts, dtype=float).reshape(len(pts), d), np.array(w))


@dataclass(frozen=True)
class LatticeWindow:
    """Unit masses at the integer points of ``[lo, hi]^d``.

    ``LatticeWindow.infinite(d)`` is the unbounded lattice (``lo``/``hi`` are
    ``None``).
    """

    dimension: int
    lo: int | None = None
    hi: int | None = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if (self.lo is None) != (self.hi is None):
            raise ValueError("lo and hi must both be given or both omitted")
        if self.lo is not None:
            if int(self.lo) != self.lo or int(self.hi) != self.hi:
                raise ValueError("window bounds must be integers")
            if not self.lo <= 0 <= self.hi:
                raise ValueError("window must satisfy lo <= 0 <= hi")

    @classmethod
    def infinite(cls, dimension: int) -> "LatticeWindow":
        return cls(dimension)

    @classmethod
    def for_radius(cls, dimension: int, R: int) -> "LatticeWindow":
        """The window ``[-ceil(sqrt d), R + ceil(sqrt d)]^d`` around ``[0, R]^d``."""
        margin = math.isqrt(dimension - 1) + 1
        return cls(dimension, -margin, R + margin)

    @property
    def is_infinite(self) -> bool:
        return self.lo is None

    @property
    def axis_lo(self) -> float:
        return -math.inf if self.lo is None else self.lo

    @property
    def axis_hi(self) -> float:
        return math.inf if self.hi is None else self.hi

    def to_json(self) -> dict:
        if self.is_infinite:
            return {"dimension": self.dimension, "infinite": True}
        return {"dimension": self.dimension, "lo": self.lo, "hi": self.hi}

    @classmethod
    def from_json(cls, obj: dict) -> "LatticeWindow":
        if obj.get("infinite"):
            return cls(int(obj["dimension"]))
        return cls(int(obj["dimension"]), int(obj["lo"]), int(obj["hi"]))

    def materialize(self) -> DeltaMeasure:
        """Explicit :class:`DeltaMeasure` with one unit delta per lattice point."""
        if self.is_infinite:
            raise ValueError("cannot materialize the unbounded lattice")
        axis = np.arange(self.lo, self.hi + 1, dtype=float)
        grids = np.meshgrid(*([axis] * self.dimension), indexing="ij")
        pts = np.stack([g.reshape(-1) for g in grids], axis=1)
        return DeltaMeasure(self.dimension, pts)


Measure = Union[DeltaMeasure, LatticeWindow]


@dataclass(frozen=True)
class Cube:
    """Closed l-infinity ball ``Q(center, radius)``."""

    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(np.asarray(self.center, dtype=float)))
        object.__setattr__(self, "center", c)
        if not self.radius > 0:
            raise ValueError("cube radius must be positive")

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def volume(self) -> float:
        return (2.0 * self.radius) ** self.dimension


def axis_count(x: float, r: float, axis_lo: float = -math.inf,
               axis_hi: float = math.inf) -> int:
    """Number of integers ``n`` with ``|x - n| <= r`` and ``axis_lo <= n <= axis_hi``."""
    if not r > 0:
        raise ValueError("radius must be positive")
    first = math.ceil(_snap(x - r))
    last = math.floor(_snap(x + r))
    if axis_lo != -math.inf:
        first = max(first, int(axis_lo))
    if axis_hi != math.inf:
        last = min(last, int(axis_hi))
    return max(0, last - first + 1)


def count_in_cube(measure: Measure, cube: Cube):
    """Mass of ``measure`` inside the closed cube.

    Lattice windows return an exact ``int``; delta measures return a float.
    """
    if cube.dimension != measure.dimension:
        raise ValueError(
            f"cube has dimension {cube.dimension}, measure has {measure.dimension}"
        )
    if isinstance(measure, LatticeWindow):
        total = 1
        for c in cube.center:
            total *= axis_count(c, cube.radius, measure.axis_lo, measure.axis_hi)
            if total == 0:
                break
        return total
    dist = np.max(np.abs(measure.points - np.asarray(cube.center)), axis=1)
    return float(np.sum(measure.weights[dist <= cube.radius + SNAP]))


def mass(measure: Measure) -> float:
    """Total mass; the unbounded lattice is rejected."""
    if isinstance(measure, LatticeWindow):
        if measure.is_infinite:
            raise ValueError("the unbounded lattice has infinite mass")
        return (measure.hi - measure.lo + 1) ** measure.dimension
    return float(np.sum(measure.weights))


def as_point(x: Sequence[float] | float, dimension: int) -> np.ndarray:
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.shape != (dimension,):
        raise ValueError(f"point has shape {p.shape}, expected ({dimension},)")
    return p
