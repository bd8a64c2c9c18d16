
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weaktype.maxfun import eval_max
from weaktype.measures import DeltaMeasure
from weaktype.oned import (C1_EXACT, IntervalUnion, OneDConfig, best_known_config, best_lambda,
                           breakpoints,
                           exact_best_lambda, functional_1d, optimize_positions, superlevel_1d)

CEIL = C1_EXACT + 1e-9

positions = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=7, unique=True).map(
    lambda xs: OneDConfig(tuple(sorted(xs)))).filter(
    lambda c: c.n == 1 or min(np.diff(c.positions)) > 1e-3)


def test_single_delta():
    c = OneDConfig((0.0,))
    for lam in (0.1, 1.0, 10.0):
        assert functional_1d(c, lam) == pytest.approx(1.0, abs=1e-12)
    assert superlevel_1d(c, 2.0).intervals == ((-0.25, 0.25),)


def test_equal_spacing_value():
    for n in (2, 3, 5, 16):
        lam, v = exact_best_lambda(OneDConfig(tuple(range(n))))
        assert v == pytest.approx((3 * n - 1) / (2 * n), rel=1e-12)


def test_interval_union_normalize():
    u = IntervalUnion.normalize([(3, 4), (0, 1), (0.5, 2), (2 + 1e-13, 2.5), (5, 4)])
    assert u.intervals == ((0.0, 2.5), (3.0, 4.0))
    assert u.total_length == pytest.approx(3.5)


def test_config_validation_and_json(tmp_path):
    with pytest.raises(ValueError):
        OneDConfig((1.0, 0.0))
    with pytest.raises(ValueError):
        OneDConfig(())
    c = OneDConfig((0.0, 0.7, 2.0), provenance="hand")
    path = tmp_path / "c.json"
    import json
    path.write_text(json.dumps(c.to_json()))
    assert OneDConfig.load(path) == c


@settings(max_examples=60, deadline=None)
@given(positions, st.floats(0.2, 5))
def test_functional_never_exceeds_ceiling(c, lam):
    assert functional_1d(c, lam) <= CEIL


@settings(max_examples=25, deadline=None)
@given(positions, st.floats(0.3, 3))
def test_superlevel_matches_dense_grid(c, lam):
    m = DeltaMeasure(1, [[p] for p in c.positions])
    lo, hi = c.positions[0] - c.n / (2 * lam) - 0.1, c.positions[-1] + c.n / (2 * lam) + 0.1
    xs = np.linspace(lo, hi, 1501)
    h = xs[1] - xs[0]
    inside = [eval_max(m, [x], 1e6).value >= lam for x in xs]
    measured = h * sum(inside)
    exact = superlevel_1d(c, lam).total_length
    # each interval boundary costs at most one grid cell
    pieces = len(superlevel_1d(c, lam).intervals)
    assert abs(measured - exact) <= 2 * h * pieces + 1e-9


@settings(max_examples=40, deadline=None)
@given(positions, st.floats(-3, 3), st.floats(0.2, 4))
def test_affine_invariance(c, shift, scale):
    base = exact_best_lambda(c)
    moved = OneDConfig(tuple(scale * p + shift for p in c.positions))
    lam, v = exact_best_lambda(moved)
    assert v == pytest.approx(base[1], rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(positions)
def test_best_lambda_is_a_valid_lower_bound(c):
    lam, v = best_lambda(c)
    assert functional_1d(c, lam) == pytest.approx(v, rel=1e-12)
    assert v <= exact_best_lambda(c)[1] + 1e-12
    assert v <= CEIL


def test_best_lambda_budget():
    with pytest.raises(ValueError):
        best_lambda(OneDConfig((0.0, 1.0)), 0)


def test_exact_maximum_is_at_a_breakpoint(rng):
    c = OneDConfig(tuple(np.sort(rng.uniform(0, 4, 5))))
    lam, v = exact_best_lambda(c)
    grid = np.linspace(0.2, 5, 4000)
    assert max(functional_1d(c, g) for g in grid) <= v + 1e-12
    assert np.any(np.isclose(breakpoints(c), lam))


def test_optimizer_trace_monotone():
    res = optimize_positions(6, iterations=120, restarts=3, seed=1)
    values = [v for _, v, _ in res.trace]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert res.value <= CEIL
    assert res.value >= 17 / 12 - 1e-12
    assert res.config.positions[0] == 0.0


def test_optimizer_is_deterministic_across_workers():
    a = optimize_positions(5, iterations=60, restarts=3, seed=4)
    b = optimize_positions(5, iterations=60, restarts=3, seed=4, workers=2)
    assert a.config == b.config and a.value == b.value and a.restart == b.restart


def test_optimizer_rejects_tiny_n():
    with pytest.raises(ValueError):
        optimize_positions(1)


def test_best_known_fixture():
    c = best_known_config(16)
    assert c.n == 16
    assert exact_best_lambda(c)[1] == pytest.approx(47 / 32, rel=1e-12)
    with pytest.raises(ValueError):
        best_known_config(3)
