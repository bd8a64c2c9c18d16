import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weaktype.construction import (LevelProfile, assemble_certificate, claim4_bound,
                                   claim4_threshold, classify, f_lower, in_Eu,
                                   intersection_measure, k_in_band, log_f_lower, ms_bound,
                                   optimal_s0, window_correction)
from weaktype.maxfun import eval_max_lattice
from weaktype.measures import Cube, LatticeWindow, count_in_cube


def test_classify_examples():
    c = classify([0.05, 0.95, 0.5, 0.2], 0.25)
    assert c.k == 2 and c.off_center == {0, 1}
    assert classify([0.5] * 6, 0.3).k == 0
    # the off-center region at level u is [0, u/2) and (1 - u/2, 1]
    assert classify([0.125, 0.875], 0.25).k == 0
    with pytest.raises(ValueError):
        classify([1.2], 0.25)


def test_level_profile_numbers():
    p = LevelProfile(0.125, 2.0, 100)
    assert p.sigma == pytest.approx(math.sqrt(0.125 * 0.875))
    assert p.r0 == pytest.approx(12.5 - 2 * p.sigma * 10)
    assert p.k_lo == pytest.approx(12.5 - 2.5 * p.sigma * 10)


def test_band_membership():
    p = LevelProfile(0.125, 2.0, 100)  # band (4.23, 5.89]
    assert not k_in_band(4, p)
    assert k_in_band(5, p)  # floor(r0), r0 not an integer
    assert not k_in_band(6, p)
    assert not k_in_band(8, p)
    assert not in_Eu([0.5] * 100, p)
    x = np.full(100, 0.5)
    x[:5] = 0.01
    assert in_Eu(x, p)


def test_f_lower_examples():
    assert f_lower(0.25, 4, 1, 1) == pytest.approx(8 / 1.75 ** 4, rel=1e-14)
    assert f_lower(0.25, 10, 0, 3) > 1
    assert f_lower(0.25, 10, 4, 10 ** 9) == pytest.approx(1.0, abs=1e-7)
    with pytest.raises(ValueError):
        f_lower(0.25, 4, 1, 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 30), st.data())
def test_f_lower_matches_rational_product(d, data):
    r = data.draw(st.integers(0, d))
    s = data.draw(st.integers(1, 20))
    u = Fraction(data.draw(st.integers(1, 15)), 16)
    exact = Fraction(2 * s) ** (d - r) * Fraction(2 * s - 1) ** r / (2 * s - u) ** d
    assert f_lower(float(u), d, r, s) == pytest.approx(float(exact), rel=1e-12)


def test_optimal_s0():
    p = LevelProfile(0.25, 2.0, 10 ** 4)
    assert optimal_s0(p) == pytest.approx(10.95, abs=0.005)
    assert optimal_s0(p) == pytest.approx(p.sigma * 100 / 4 + 0.125, rel=1e-12)
    far = LevelProfile(0.25, 1e6, 50)
    assert optimal_s0(far) == pytest.approx(0.125, rel=1e-4)


def test_claim4_growth_at_large_d():
    p = LevelProfile(0.25, 2.0, 10 ** 6)
    value = claim4_threshold(p)
    assert math.log(value) >= 2.0 - 0.05


@pytest.mark.parametrize("d,u", [(5, 0.125), (20, 0.25)])
def test_claim4_counting(rng, d, u):
    p = LevelProfile(u, 2.0, d)
    w = LatticeWindow.infinite(d)
    for x in rng.random((40, d)):
        r = classify(x, u).k
        for s in range(1, p.default_s_cap + 1):
            count = count_in_cube(w, Cube(x, s - u / 2))
            assert count >= (2 * s) ** (d - r) * (2 * s - 1) ** r
        bound, _ = claim4_bound(x, p)
        assert eval_max_lattice(x, w, p.default_s_cap).value >= bound * (1 - 1e-12)


def test_claim4_all_off_center():
    p = LevelProfile(0.25, 2.0, 8)
    value, s = claim4_bound([0.01] * 8, p)
    assert value == pytest.approx(f_lower(0.25, 8, 8, s))
    assert value == pytest.approx(math.exp(log_f_lower(0.25, 8, 8, s)))


def test_intersection_measure():
    assert intersection_measure(0.25, 0.125, 3, 1, 0) == pytest.approx(0.0703125, rel=1e-14)
    assert intersection_measure(0.25, 0.1, 6, 3, 3) == pytest.approx(0.1 ** 3 * 0.75 ** 3)
    with pytest.raises(ValueError):
        intersection_measure(0.1, 0.25, 3, 1, 0)


def test_intersection_measure_volume(rng):
    # fraction of uniform points matching the (K, M) pattern in d = 3
    u, v = 0.25, 0.125
    X = rng.random((400_000, 3))
    off_u = (X < u / 2) | (X > 1 - u / 2)
    off_v = (X < v / 2) | (X > 1 - v / 2)
    hit = off_u[:, 0] & ~off_v[:, 0] & ~off_u[:, 1] & ~off_u[:, 2]
    p = hit.mean()
    se = math.sqrt(p * (1 - p) / len(X))
    assert abs(p - intersection_measure(u, v, 3, 1, 0)) < 4 * se


def test_window_correction():
    assert window_correction(1, None) == 1.0
    assert window_correction(10, 1000) == pytest.approx(0.9296, abs=1e-4)
    assert window_correction(10, 50) == pytest.approx(0.255, abs=1e-3)
    assert window_correction(1, 10 ** 9) == pytest.approx(1.0, abs=1e-8)


def test_ms_bound():
    assert ms_bound(1) == pytest.approx(1.5, rel=1e-15)
    assert ms_bound(2) == pytest.approx(((1 + math.sqrt(2)) / 2) ** 2, rel=1e-14)
    values = [ms_bound(d) for d in range(1, 200)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert all(math.sqrt(2) < v < 2 for v in values)
    assert ms_bound(10 ** 8) == pytest.approx(math.sqrt(2), rel=1e-7)


def test_certificate():
    t = 10.0
    from weaktype.probability import union_floor
    cert = assemble_certificate(1, math.exp(t * t / 2) / 2, union_floor(t))
    assert cert.asymptotic and cert.window_factor == 1.0
    assert cert.bound == pytest.approx(t ** (1 / 3) / (40 * math.e ** 2 * math.sqrt(2 * math.pi)))
    assert cert.bound == pytest.approx(2.908e-3, rel=1e-3)
    assert assemble_certificate(3, 2.0, 0.0).bound == 0.0
    finite = assemble_certificate(10, 2.0, 0.5, R=50)
    assert finite.bound == pytest.approx(window_correction(10, 50))
    assert not finite.asymptotic
    with pytest.raises(ValueError):
        assemble_certificate(2, 1.0, 0.5, provenance={"alpha": "guess"})
