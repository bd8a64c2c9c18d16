"""Exact binomial computations and the closed-form brackets they are checked against.

The proof controls the measure of the band sets through the central limit
theorem.  Here every such measure is computed exactly as a binomial sum in
log space, and the asymptotic brackets are evaluated next to it so that the
dimension from which each bracket actually holds can be measured.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .construction import LevelProfile

_LOG_2PI = math.log(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * _LOG_2PI


@dataclass(frozen=True)
class BinomialSpec:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError("n must be a nonnegative integer")
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")

    @property
    def mean(self) -> float:
        return self.n * self.p

    @property
    def sd(self) -> float:
        return math.sqrt(self.n * self.p * (1.0 - self.p))


# -- Loader's saddle-point evaluation of the binomial pmf ------------------

_S0, _S1, _S2, _S3, _S4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188


def _stirlerr(n: np.ndarray) -> np.ndarray:
    """``log(n!) - log(sqrt(2 pi n) (n/e)^n)`` for integers ``n >= 1``."""
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    small = n <= 15
    if np.any(small):
        ns = n[small]
        lg = np.array([math.lgamma(v + 1.0) for v in ns])
        out[small] = lg - (ns + 0.5) * np.log(ns) + ns - _LOG_SQRT_2PI
    big = ~small
    if np.any(big):
        nb = n[big]
        nn = nb * nb
        out[big] = np.select(
            [nb > 500, nb > 80, nb > 35],
            [
                (_S0 - _S1 / nn) / nb,
                (_S0 - (_S1 - _S2 / nn) / nn) / nb,
                (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / nb,
            ],
            (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / nb,
        )
    return out


def _bd0(x: np.ndarray, npq: np.ndarray) -> np.ndarray:
    """Deviance term ``x log(x / np) + np - x`` without cancellation."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    npq = np.broadcast_to(np.asarray(npq, dtype=float), x.shape)
    out = x * np.log(x / npq) + npq - x
    near = np.abs(x - npq) < 0.1 * (x + npq)
    if np.any(near):
        xn, mn = x[near], npq[near]
        v = (xn - mn) / (xn + mn)
        s = (xn - mn) * v
        ej = 2.0 * xn * v
        v2 = v * v
        for j in range(1, 40):
            ej = ej * v2
            s = s + ej / (2 * j + 1)
        out[near] = s
    return out


def log_binom_pmf(spec: BinomialSpec, k):
    """``log P(S = k)`` for ``S ~ B(n, p)``; ``-inf`` outside ``0..n``.

    Accepts a scalar or an integer array for ``k``.
    """
    n, p = spec.n, spec.p
    q = 1.0 - p
    k_arr = np.atleast_1d(np.asarray(k))
    out = np.full(k_arr.shape, -np.inf)
    valid = (k_arr >= 0) & (k_arr <= n) & (k_arr == np.floor(k_arr))
    kv = k_arr[valid].astype(float)
    res = np.empty(kv.shape)
    lo = kv == 0
    hi = kv == n
    if p < 0.1:
        res[lo] = -_bd0(np.array(float(n)), n * q) - n * p
    else:
        res[lo] = n * math.log(q)
    if q < 0.1:
        res[hi & ~lo] = -_bd0(np.array(float(n)), n * p) - n * q
    else:
        res[hi & ~lo] = n * math.log(p)
    mid = ~lo & ~hi
    if np.any(mid):
        km = kv[mid]
        lc = (
            _stirlerr(np.array([float(n)]))[0]
            - _stirlerr(km)
            - _stirlerr(n - km)
            - _bd0(km, n * p)
            - _bd0(n - km, n * q)
        )
        lf = _LOG_2PI + np.log(km) + np.log1p(-km / n)
        res[mid] = lc - 0.5 * lf
    out[valid] = res
    if np.ndim(k) == 0:
        return float(out[0])
    return out


def _logsumexp(lp: np.ndarray) -> float:
    if lp.size == 0:
        return -math.inf
    m = float(np.max(lp))
    if m == -math.inf:
        return m
    # np.sum reduces pairwise, which keeps rounding error logarithmic
    return m + math.log(float(np.sum(np.exp(lp - m))))


def integer_range(lo: float, hi: float, n: int) -> tuple[int, int]:
    """Integers ``k`` with ``lo < k <= hi`` clipped to ``0..n``, as ``(first, last)``."""
    first = max(0, math.floor(lo) + 1)
    last = min(n, math.floor(hi))
    return first, last


def log_binom_range_prob(spec: BinomialSpec, lo: float, hi: float) -> float:
    first, last = integer_range(lo, hi, spec.n)
    if last < first:
        return -math.inf
    return _logsumexp(log_binom_pmf(spec, np.arange(first, last + 1)))


def binom_range_prob(spec: BinomialSpec, lo: float, hi: float) -> float:
    """``P(lo < S <= hi)`` summed exactly over the integers in the range."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    return math.exp(log_binom_range_prob(spec, lo, hi))


def normal_tail(a: float, b: float) -> float:
    """``P(a < Z <= b)`` for a standard normal ``Z``, accurate in both tails."""
    if not a < b:
        raise ValueError("need a < b")
    r2 = math.sqrt(2.0)
    if a >= 0:
        return 0.5 * (math.erfc(a / r2) - math.erfc(b / r2))
    if b <= 0:
        return 0.5 * (math.erfc(-b / r2) - math.erfc(-a / r2))
    return 1.0 - 0.5 * math.erfc(b / r2) - 0.5 * math.erfc(-a / r2)


# -- closed forms ---------------------------------------------------------

def claim1_bracket(t: float) -> tuple[float, float]:
    """Closed-form bracket ``(e^{-t^2/2} / (2 e^2 t sqrt(2 pi)), e^{-t^2/2} / (t sqrt(pi)))``."""
    if not t > 0:
        raise ValueError("t must be positive")
    g = math.exp(-t * t / 2.0)
    return g / (2.0 * math.e ** 2 * t * math.sqrt(2.0 * math.pi)), g / (t * math.sqrt(math.pi))


def clt_bracket(t: float) -> tuple[float, float]:
    """``[1/2, sqrt 2]`` times the normal mass of ``(-t - 1/t, -t]``."""
    g = normal_tail(-t - 1.0 / t, -t)
    return 0.5 * g, math.sqrt(2.0) * g


def claim2_factor(t: float) -> float:
    """Relative intersection size ``t^{-1/3} exp(-2 t^{2/3} / 9)``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return t ** (-1.0 / 3.0) * math.exp(-2.0 * t ** (2.0 / 3.0) / 9.0)


def union_floor(t: float) -> float:
    """Closed-form floor ``t^{1/3} e^{-t^2/2} / (20 e^2 sqrt(2 pi))`` for the union."""
    return t ** (1.0 / 3.0) * math.exp(-t * t / 2.0) / (20.0 * math.e ** 2 * math.sqrt(2.0 * math.pi))


def theorem_constant(t: float) -> float:
    """Asymptotic lower bound ``t^{1/3} / (40 e^2 sqrt(2 pi))``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return t ** (1.0 / 3.0) / (40.0 * math.e ** 2 * math.sqrt(2.0 * math.pi))


# -- band sets ------------------------------------------------------------

def exact_Eu(profile: LevelProfile) -> float:
    """Exact Lebesgue measure of the band set at level ``u``."""
    spec = BinomialSpec(profile.d, profile.u)
    return math.exp(log_binom_range_prob(spec, profile.k_lo, profile.r0))


def _check_pair(u: float, v: float):
    if not 0.0 < v < u < 1.0:
        raise ValueError(f"levels must satisfy 0 < v < u < 1, got u={u}, v={v}")


def pairwise_intersection_bound(d: int, u: float, v: float, t: float) -> float:
    """Upper bound on ``|E^u ∩ E^v|`` for levels ``v < u``.

    Sums, over the admissible off-center counts ``k`` at level ``u``, the
    binomial weight of ``k`` times the probability that at most
    ``floor(v d - t sigma_v sqrt d)`` of those ``k`` coordinates are also
    off center at level ``v``.
    """
    _check_pair(u, v)
    pu, pv = LevelProfile(u, t, d), LevelProfile(v, t, d)
    first, last = integer_range(pu.k_lo, pu.r0, d)
    if last < first:
        return 0.0
    m_max = math.floor(pv.r0)
    if m_max < 0:
        return 0.0
    ks = np.arange(first, last + 1)
    outer = log_binom_pmf(BinomialSpec(d, u), ks)
    ratio = v / u
    total = []
    for k, lw in zip(ks, outer):
        inner = log_binom_range_prob(BinomialSpec(int(k), ratio), -1.0, m_max)
        total.append(lw + inner)
    return math.exp(_logsumexp(np.array(total)))


def standardized_gap(d: int, u: float, v: float, t: float) -> dict:
    """Diagnostics for the standardized distance used in the intersection estimate.

    Returns the d-free lower bound built from the mean/sd estimates, the
    worst actual standardized gap over admissible ``k``, and the target
    ``2 t^{1/3} / 3``.
    """
    _check_pair(u, v)
    pu, pv = LevelProfile(u, t, d), LevelProfile(v, t, d)
    a = math.sqrt(v) * math.sqrt(1.0 / u - 1.0)
    bound = (t * math.sqrt(1.0 - v) - (t + 1.0 / t) * a) / math.sqrt(1.0 - v / u)
    first, last = integer_range(pu.k_lo, pu.r0, d)
    ratio = v / u
    gaps = [
        (k * ratio - v * d + t * pv.sigma * math.sqrt(d)) / math.sqrt(k * ratio * (1 - ratio))
        for k in range(max(first, 1), last + 1)
    ]
    return {
        "bound": bound,
        "actual_min": min(gaps) if gaps else math.nan,
        "target": 2.0 * t ** (1.0 / 3.0) / 3.0,
    }


def u_grid(t: float, a: float = 0.125, b: float = 0.25) -> list[float]:
    """Levels ``a + j t^{-4/3}`` for ``j = 0..M`` with ``a + M t^{-4/3} <= b``."""
    if not t > 1:
        raise ValueError("t must exceed 1")
    if not 0.0 < a <= b < 1.0:
        raise ValueError("level range must satisfy 0 < a <= b < 1")
    h = t ** (-4.0 / 3.0)
    M = math.floor((b - a) / h + 1e-12)
    return [a + j * h for j in range(M + 1)]


@dataclass(frozen=True)
class UnionBound:
    exact_sum: float
    pairwise_total: float
    lower: float
    closed_form_floor: float
    levels: tuple


def union_lower_bound(d: int, t: float, a: float = 0.125, b: float = 0.25) -> UnionBound:
    """Inclusion-exclusion lower bound on the measure of the union of band sets."""
    levels = u_grid(t, a, b)
    sizes = [exact_Eu(LevelProfile(u, t, d)) for u in levels]
    pairs = 0.0
    for j in range(len(levels)):
        for k in range(j):
            pairs += pairwise_intersection_bound(d, levels[j], levels[k], t)
    s = math.fsum(sizes)
    return UnionBound(s, pairs, max(0.0, s - pairs), union_floor(t), tuple(levels))


# -- claim reports --------------------------------------------------------

CLAIM_IDS = ("claim1", "claim1_clt", "claim2", "claim3")
REPORT_COLUMNS = ("claim_id", "t", "d", "u", "v", "exact_value", "bracket_lo", "bracket_hi", "holds")


@dataclass(frozen=True)
class ClaimReport:
    claim_id: str
    t: float
    d: int
    u: float | None
    v: float | None
    exact_value: float
    bracket_lo: float
    bracket_hi: float
    holds: bool

    def to_row(self) -> dict:
        return asdict(self)


def claim1_report(u: float, t: float, d: int) -> ClaimReport:
    value = exact_Eu(LevelProfile(u, t, d))
    lo, hi = claim1_bracket(t)
    return ClaimReport("claim1", t, d, u, None, value, lo, hi, lo < value < hi)


def claim1_clt_report(u: float, t: float, d: int) -> ClaimReport:
    value = exact_Eu(LevelProfile(u, t, d))
    lo, hi = clt_bracket(t)
    return ClaimReport("claim1_clt", t, d, u, None, value, lo, hi, lo < value < hi)


def claim2_report(u: float, v: float, t: float, d: int) -> ClaimReport:
    value = pairwise_intersection_bound(d, u, v, t)
    cap = claim2_factor(t) * exact_Eu(LevelProfile(u, t, d))
    return ClaimReport("claim2", t, d, u, v, value, 0.0, cap, value <= cap)


def claim3_report(t: float, d: int, a: float = 0.125, b: float = 0.25) -> ClaimReport:
    ub = union_lower_bound(d, t, a, b)
    return ClaimReport(
        "claim3", t, d, None, None, ub.lower, ub.closed_form_floor, 1.0,
        ub.closed_form_floor <= ub.lower <= 1.0,
    )


def empirical_threshold(reports) -> int | None:
    """Smallest ``d`` from which every later report on the schedule holds.

    ``reports`` must be ordered by increasing ``d``; ``None`` when the last
    one fails.
    """
    threshold = None
    for rep in reversed(list(reports)):
        if not rep.holds:
            break
        threshold = rep.d
    return threshold


def d_schedule(start: int, stop: int, factor: int = 2) -> list[int]:
    """Geometric schedule ``start, factor*start, ...`` not exceeding ``stop``."""
    if start < 1 or factor < 2:
        raise ValueError("need start >= 1 and factor >= 2")
    out = []
    d = start
    while d <= stop:
        out.append(d)
        d *= factor
    return out
