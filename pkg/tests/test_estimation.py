import math
from dataclasses import replace

import numpy as np
import pytest

from weaktype import estimation as est
from weaktype.construction import LevelProfile, intersection_measure
from weaktype.probability import exact_Eu
from weaktype.rng import derive_seed, stream_generator


def test_streams_are_reproducible_and_distinct():
    a = stream_generator(7, 0).random(5)
    assert np.array_equal(a, stream_generator(7, 0).random(5))
    assert not np.array_equal(a, stream_generator(7, 1).random(5))
    assert not np.array_equal(a, stream_generator(8, 0).random(5))
    assert derive_seed(7, 3) == derive_seed(7, 3) != derive_seed(7, 4)


def test_config_validation():
    with pytest.raises(ValueError):
        est.McConfig(samples=0)
    with pytest.raises(ValueError):
        est.McConfig(alpha_grid=(2.0, 1.0))
    assert est.McConfig().rmax_for(4) == 3.0
    grid = est.default_alpha_grid(2.0, 64)
    assert grid[0] == 0.5 and grid[-1] == pytest.approx(math.e ** 2)


def test_binomial_ci():
    lo, hi = est.binomial_ci(0.5, 10_000)
    assert lo == pytest.approx(0.5 - est.Z99 * 0.005)
    lo, hi = est.binomial_ci(0.0, 1000)
    assert lo == 0.0 and 0 < hi < 0.01


def test_samples_independent_of_workers():
    cfg = est.McConfig(samples=3 * est.BLOCK + 17, seed=11)
    a = est.sample_max_values(2, cfg)
    b = est.sample_max_values(2, replace(cfg, workers=3))
    assert a.shape == (3 * est.BLOCK + 17,)
    assert np.array_equal(a, b)


def test_superlevel_trivial_levels():
    cfg = est.McConfig(samples=5000, seed=3)
    assert est.estimate_superlevel(1, 1.0, cfg).p_hat == 1.0
    assert est.estimate_superlevel(2, 1e6, cfg).p_hat < 1e-3
    with pytest.raises(ValueError):
        est.estimate_superlevel(1, 0.0, cfg)


def test_one_dimensional_lattice_value():
    # on the integer lattice the maximal function is >= 3/2 everywhere,
    # and the best value of alpha |{M >= alpha}| per cell is exactly 3/2
    grid = tuple(np.linspace(1.0, 2.0, 41))
    bb = est.best_bound(1, est.McConfig(samples=20_000, seed=5, alpha_grid=grid))
    assert bb.alpha == pytest.approx(1.5)
    assert bb.value == pytest.approx(1.5)


def test_best_bound_certified_forms():
    bb = est.best_bound(2, est.McConfig(samples=10_000, seed=2), R_list=(10, 1000))
    assert set(bb.certified) == {10, 1000}
    assert bb.certified[10] < bb.certified[1000] < bb.value
    row = bb.to_row()
    assert tuple(row) == est.CSV_COLUMNS
    assert bb.ci[0] <= bb.value <= bb.ci[1]


def test_degenerate_grid_flags():
    bb = est.best_bound(2, est.McConfig(samples=2000, seed=2, alpha_grid=(1e8, 1e9)))
    assert bb.degenerate and bb.value == 0.0


def test_estimate_Eu_against_exact():
    d, u, t = 200, 0.125, 2.0
    e = est.estimate_Eu(d, u, t, est.McConfig(samples=50_000, seed=9))
    assert e.z_score(exact_Eu(LevelProfile(u, t, d))) < 3


def test_estimate_intersection():
    d, u, v = 6, 0.3, 0.1
    e = est.estimate_intersection(d, u, v, K=[0, 2], M=[2], config=est.McConfig(samples=200_000, seed=4))
    assert e.z_score(intersection_measure(u, v, d, 2, 1)) < 3
    with pytest.raises(ValueError):
        est.estimate_intersection(d, u, v, K=[0], M=[1], config=est.McConfig(samples=10))


def test_estimate_union_is_at_least_each_level():
    cfg = est.McConfig(samples=30_000, seed=6)
    levels = (0.2, 0.5)
    union = est.estimate_union(100, levels, 1.5, cfg)
    for u in levels:
        assert union.p_hat >= est.estimate_Eu(100, u, 1.5, cfg).p_hat


def test_sweep_seeds_per_dimension():
    cfg = est.McConfig(samples=2000, seed=1)
    rows = est.sweep_dimensions([1, 2], cfg)
    assert [r.d for r in rows] == [1, 2]
    assert rows[1].seed == derive_seed(1, 2)
    with pytest.raises(ValueError):
        est.sweep_dimensions([], cfg)
