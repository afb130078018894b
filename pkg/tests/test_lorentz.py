"""
Tests for lorentz/rearrangement.py — step profiles of f*, Lorentz norms and
the Lorentz Hoelder bound.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grid.core import Cube, indicator, level_measure, make_grid
from lorentz.rearrangement import (
    InadmissibleSpaceError,
    decreasing_rearrangement,
    lorentz_holder_bound,
    lorentz_norm,
    weak_strong_constant,
)


def _make_unit_indicator():
    grid = make_grid(1, 32, 8.0)
    return indicator(grid, Cube((0.0,), 1.0))


def _make_plateaus():
    grid = make_grid(1, 32, 8.0)
    return 2.0 * indicator(grid, Cube((0.0,), 1.0)) + indicator(grid, Cube((1.0,), 2.0))


def _make_random(seed: int, cells: int = 64):
    rng = np.random.default_rng(seed)
    grid = make_grid(1, cells, 4.0)
    values = rng.normal(size=grid.shape) * (rng.random(grid.shape) < 0.7)
    return grid.with_values(values)


class TestDecreasingRearrangement:
    def test_plateau_profile(self):
        profile = decreasing_rearrangement(_make_plateaus())
        assert list(profile.breakpoints) == [0.0, 1.0, 3.0]
        assert list(profile.levels) == [2.0, 1.0]
        assert profile.plateaus() == [(0.0, 1.0, 2.0), (1.0, 3.0, 1.0)]

    def test_zero_function_has_empty_profile(self):
        profile = decreasing_rearrangement(make_grid(1, 8, 1.0))
        assert profile.is_empty
        assert profile.total_measure == 0.0

    def test_negative_weight_raises(self):
        f = _make_plateaus()
        with pytest.raises(ValueError):
            decreasing_rearrangement(f, w=f - 1.5)

    def test_value_at(self):
        profile = decreasing_rearrangement(_make_plateaus())
        assert profile.value_at(0.0) == 2.0
        assert profile.value_at(1.0) == 1.0
        assert profile.value_at(3.0) == 0.0

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_distribution_matches_threshold_scan(self, seed):
        f = _make_random(seed)
        rng = np.random.default_rng(100 + seed)
        w = f.with_values(rng.uniform(0.1, 3.0, size=f.shape))
        profile = decreasing_rearrangement(f, w)
        for s in [0.0] + sorted(set(np.abs(f.values))):
            assert profile.measure_above(s) == pytest.approx(level_measure(f, s, w), rel=1e-12, abs=1e-15)

    def test_profile_invariant_to_tie_order(self):
        grid = make_grid(1, 8, 8.0)
        a = grid.with_values([1.0, 2.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0])
        b = grid.with_values([2.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0])
        pa = decreasing_rearrangement(a)
        pb = decreasing_rearrangement(b)
        assert np.array_equal(pa.breakpoints, pb.breakpoints)
        assert np.array_equal(pa.levels, pb.levels)


class TestLorentzNorm:
    def test_unit_indicator_p2_q1(self):
        assert lorentz_norm(_make_unit_indicator(), 2, 1) == pytest.approx(2.0)

    def test_unit_indicator_p2_q2(self):
        assert lorentz_norm(_make_unit_indicator(), 2, 2) == pytest.approx(1.0)

    def test_unit_indicator_weak(self):
        assert lorentz_norm(_make_unit_indicator(), 2, math.inf) == pytest.approx(1.0)

    def test_sup_norm(self):
        assert lorentz_norm(_make_plateaus(), math.inf, math.inf) == 2.0

    def test_inadmissible_pair(self):
        with pytest.raises(InadmissibleSpaceError):
            lorentz_norm(_make_plateaus(), math.inf, 2)
        with pytest.raises(InadmissibleSpaceError):
            lorentz_norm(_make_plateaus(), 2, 0)

    def test_matches_lp_norm_when_p_equals_q(self):
        f = _make_random(5)
        direct = (np.sum(np.abs(f.values) ** 3) * f.cell_volume) ** (1 / 3)
        assert lorentz_norm(f, 3, 3) == pytest.approx(direct, rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(c=st.floats(-50, 50).filter(lambda c: abs(c) > 1e-3), seed=st.integers(0, 1000))
    def test_scaling(self, c, seed):
        f = _make_random(seed, cells=32)
        assert lorentz_norm(c * f, 2, 1.5) == pytest.approx(abs(c) * lorentz_norm(f, 2, 1.5), rel=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(
        p=st.floats(1.1, 6.0),
        q_frac=st.floats(0.1, 1.0),
        seed=st.integers(0, 1000),
    )
    def test_weak_strong_inclusion(self, p, q_frac, seed):
        q = p * q_frac
        f = _make_random(seed, cells=32)
        weak = lorentz_norm(f, p, math.inf)
        assert weak <= weak_strong_constant(p, q) * lorentz_norm(f, p, q) * (1 + 1e-12)


class TestLorentzHolderBound:
    def test_two_l2_factors(self):
        p, q, bound = lorentz_holder_bound([(1, 2, 2), (1, 2, 2)])
        assert (p, q) == (pytest.approx(1.0), pytest.approx(1.0))
        assert bound == pytest.approx(2.0)

    def test_sup_factors(self):
        p, q, bound = lorentz_holder_bound([(3.0, math.inf, math.inf), (0.5, math.inf, math.inf)])
        assert math.isinf(p) and math.isinf(q)
        assert bound == 1.5

    def test_weak_factors(self):
        p, q, bound = lorentz_holder_bound([(1, 2, math.inf), (1, 2, math.inf)])
        assert p == pytest.approx(1.0)
        assert math.isinf(q)
        assert bound == pytest.approx(2.0)

    def test_rejects_bad_factors(self):
        with pytest.raises(InadmissibleSpaceError):
            lorentz_holder_bound([(1, 1, 1)])
        with pytest.raises(ValueError):
            lorentz_holder_bound([])
        with pytest.raises(ValueError):
            lorentz_holder_bound([(-1, 2, 2)])

    @pytest.mark.parametrize("seed", range(6))
    def test_bound_holds_for_lebesgue_factors(self, seed):
        f = _make_random(seed, cells=32)
        g = _make_random(seed + 50, cells=32)
        p1, p2 = 2.5, 4.0
        p, q, bound = lorentz_holder_bound([(lorentz_norm(f, p1, p1), p1, p1), (lorentz_norm(g, p2, p2), p2, p2)])
        assert lorentz_norm(f * g, p, q) <= bound * (1 + 1e-12)
