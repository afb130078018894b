"""
Tests for spaces/ — descriptors, norm evaluators, Morrey and block norms,
W_X^alpha checks and BMO.
"""
import json
import math

import numpy as np
import pytest
from scipy import optimize

from grid.core import Ball, Cube, indicator, make_grid
from lorentz.rearrangement import InadmissibleSpaceError
from spaces.bmo import bmo_norm, bmo_norm_with_cube, mean_oscillation, sharp_maximal
from spaces.descriptors import (
    SpaceDescriptor,
    YoungFunction,
    conjugate,
    conjugate_exponent,
    load_descriptor,
)
from spaces.morrey import (
    BallFamily,
    MorreyWeight,
    block_norm_upper_bound,
    classical_morrey_norm,
    morrey_lorentz_admissible,
    morrey_norm,
    wx_alpha_check,
    wx_delta_check,
)
from spaces.norms import (
    chi_ball_norm,
    harmonic_mean_exponent,
    harmonic_product_defect,
    log_holder_constant,
    luxemburg_norm,
    modular,
    orlicz_local_norm,
    space_norm,
    unit_ball_volume,
)

CUBIC_ROOT = 1.324717957244746  # real root of x^3 = x + 1


def _make_line(cells: int = 32, extent: float = 8.0):
    return make_grid(1, cells, extent)


def _make_unit_indicator():
    grid = _make_line()
    return indicator(grid, Cube((0.0,), 1.0))


def _make_two_branch_exponent(grid):
    """Helper: p = 2 left of the origin, 3 right of it."""
    return grid.sample(lambda x: np.where(x < 0, 2.0, 3.0))


def _make_interior_family():
    return BallFamily(((0.0,), (0.5,)), (0.25, 0.5, 1.0))


class TestDescriptors:
    def test_conjugate(self):
        assert conjugate(2) == 2.0
        assert conjugate(1) == math.inf
        assert conjugate(math.inf) == 1.0
        assert conjugate(3) == pytest.approx(1.5)

    def test_inadmissible_descriptors(self):
        with pytest.raises(InadmissibleSpaceError):
            SpaceDescriptor.lebesgue(0.5)
        with pytest.raises(InadmissibleSpaceError):
            SpaceDescriptor.lorentz(math.inf, 2)
        with pytest.raises(InadmissibleSpaceError):
            SpaceDescriptor("sobolev")
        with pytest.raises(InadmissibleSpaceError):
            SpaceDescriptor(SpaceDescriptor.lebesgue(2).kind, p=2, power=0.0)
        with pytest.raises(InadmissibleSpaceError):
            SpaceDescriptor.variable(_make_line() + 0.5)

    def test_young_function_validation(self):
        with pytest.raises(InadmissibleSpaceError):
            YoungFunction.power(0.5)
        with pytest.raises(InadmissibleSpaceError):
            YoungFunction.exp_power(0.5)
        with pytest.raises(InadmissibleSpaceError):
            YoungFunction("gauss")
        assert YoungFunction.l_log_l()(0.0) == 0.0

    def test_associates(self):
        assert SpaceDescriptor.lebesgue(3).associate().p == pytest.approx(1.5)
        lorentz = SpaceDescriptor.lorentz(3, 1).associate()
        assert lorentz.p == pytest.approx(1.5)
        assert math.isinf(lorentz.q)
        grid = _make_line()
        w = grid + 4.0
        dual = SpaceDescriptor.lebesgue(2, weight=w).associate()
        assert np.allclose(dual.weight.values, 0.25)
        with pytest.raises(InadmissibleSpaceError):
            SpaceDescriptor.orlicz(YoungFunction.l_log_l()).associate()

    def test_variable_associate_is_pointwise_conjugate(self):
        p = _make_two_branch_exponent(_make_line())
        q = SpaceDescriptor.variable(p).associate().exponent
        assert set(np.round(q.values, 12)) == {2.0, 1.5}
        assert conjugate_exponent(p.with_values(np.full(32, 1.0))).values[0] == math.inf

    def test_orlicz_power_associate_is_complementary(self):
        # Phi(t) = t^2 has Psi(s) = s^2 / 4
        dual = SpaceDescriptor.orlicz(YoungFunction.power(2.0)).associate()
        assert dual.young.p == pytest.approx(2.0)
        assert dual.young.scale == pytest.approx(0.25)
        rng = np.random.default_rng(12)
        g = _make_line().with_values(rng.normal(size=32))
        assert space_norm(g, dual) == pytest.approx(0.5 * space_norm(g, SpaceDescriptor.lebesgue(2)), rel=1e-9)
        with pytest.raises(InadmissibleSpaceError):
            YoungFunction.exp_power(1.0).complementary()
        with pytest.raises(InadmissibleSpaceError):
            YoungFunction.power(2.0, scale=0.0)

    def test_pairing_constants(self):
        assert SpaceDescriptor.lebesgue(2).pairing_constant() == 1.0
        assert SpaceDescriptor.lorentz(3, 2).pairing_constant() == 1.0
        assert SpaceDescriptor.variable(_make_two_branch_exponent(_make_line())).pairing_constant() == 2.0
        assert SpaceDescriptor.orlicz(YoungFunction.power(3.0)).pairing_constant() == 2.0

    def test_flatten_power(self):
        assert SpaceDescriptor.lebesgue(4).with_power(0.5).flatten_power().p == pytest.approx(2.0)
        lorentz = SpaceDescriptor.lorentz(4, 2).with_power(0.5).flatten_power()
        assert (lorentz.p, lorentz.q, lorentz.power) == (2.0, 1.0, 1.0)
        p = _make_two_branch_exponent(_make_line())
        flat = SpaceDescriptor.variable(p).with_power(2.0).flatten_power()
        assert set(np.round(flat.exponent.values, 12)) == {4.0, 6.0}
        with pytest.raises(InadmissibleSpaceError):
            SpaceDescriptor.lebesgue(2).with_power(0.25).flatten_power()
        with pytest.raises(InadmissibleSpaceError):
            SpaceDescriptor.orlicz(YoungFunction.power(2.0)).with_power(0.5).flatten_power()

    def test_flattened_power_has_same_norm(self):
        rng = np.random.default_rng(13)
        f = _make_line().with_values(rng.normal(size=32))
        X = SpaceDescriptor.lorentz(3, 2).with_power(0.75)
        assert space_norm(f, X) == pytest.approx(space_norm(f, X.flatten_power()), rel=1e-9)
    def test_powers_compose(self):
        X = SpaceDescriptor.lebesgue(2).with_power(2).with_power(1.5)
        assert X.power == 3.0
        assert X.label() == "(L^2)^3"

    def test_dict_round_trip_keeps_meaning(self, tmp_path):
        X = SpaceDescriptor.variable(_make_two_branch_exponent(_make_line()))
        path = tmp_path / "space.json"
        path.write_text(json.dumps(X.to_dict()))
        Y = load_descriptor(path)
        assert Y.kind == X.kind
        assert np.array_equal(Y.exponent.values, X.exponent.values)
        assert Y.label() == X.label()


class TestSpaceNorm:
    def test_lebesgue_indicator(self):
        assert space_norm(_make_unit_indicator(), SpaceDescriptor.lebesgue(2)) == pytest.approx(1.0)

    def test_lorentz_indicator(self):
        assert space_norm(_make_unit_indicator(), SpaceDescriptor.lorentz(2, 1)) == pytest.approx(2.0)

    def test_two_branch_variable_exponent(self):
        grid = _make_line()
        f = indicator(grid, Cube((-1.0,), 2.0))
        X = SpaceDescriptor.variable(_make_two_branch_exponent(grid))
        assert space_norm(f, X) == pytest.approx(CUBIC_ROOT, rel=1e-9)

    def test_zero_function(self):
        for X in (SpaceDescriptor.lebesgue(2), SpaceDescriptor.orlicz(YoungFunction.l_log_l())):
            assert space_norm(_make_line(), X) == 0.0

    def test_power_space(self):
        rng = np.random.default_rng(4)
        grid = _make_line()
        f = grid.with_values(rng.normal(size=grid.shape))
        squared = SpaceDescriptor.lebesgue(2).with_power(2)
        assert space_norm(f, squared) == pytest.approx(space_norm(f, SpaceDescriptor.lebesgue(4)), rel=1e-12)

    def test_weighted_lebesgue(self):
        f = _make_unit_indicator()
        w = f.zeros() + 4.0
        assert space_norm(f, SpaceDescriptor.lebesgue(2, weight=w)) == pytest.approx(2.0)

    def test_orlicz_power_matches_lebesgue(self):
        rng = np.random.default_rng(8)
        grid = _make_line()
        f = grid.with_values(rng.normal(size=grid.shape))
        X = SpaceDescriptor.orlicz(YoungFunction.power(2.0))
        assert space_norm(f, X) == pytest.approx(space_norm(f, SpaceDescriptor.lebesgue(2)), rel=1e-9)


class TestModularAndLuxemburg:
    def test_modular_constant_exponent(self):
        f = _make_unit_indicator()
        assert modular(f, f.zeros() + 2.0) == pytest.approx(1.0)

    def test_modular_zero(self):
        grid = _make_line()
        assert modular(grid, grid + 2.0) == 0.0

    def test_modular_two_branch(self):
        grid = _make_line()
        f = indicator(grid, Cube((-1.0,), 2.0))
        assert modular(f, _make_two_branch_exponent(grid)) == pytest.approx(2.0)

    def test_luxemburg_constant_exponent(self):
        f = _make_unit_indicator()
        assert luxemburg_norm(f, f.zeros() + 2.0) == pytest.approx(1.0, rel=1e-10)
        assert luxemburg_norm(f.zeros(), f.zeros() + 2.0) == 0.0

    def test_infinite_exponent_region_acts_as_sup(self):
        grid = _make_line()
        f = 3.0 * indicator(grid, Cube((0.0,), 1.0))
        p = grid.with_values(np.full(32, np.inf))
        assert luxemburg_norm(f, p) == pytest.approx(3.0, rel=1e-10)

    def test_exponent_below_one_rejected(self):
        f = _make_unit_indicator()
        with pytest.raises(ValueError):
            modular(f, f.zeros() + 0.5)


class TestOrliczLocalNorm:
    def test_exp_power_constant(self):
        f = _make_line() + 3.0
        value = orlicz_local_norm(f, Cube((-1.0,), 2.0), YoungFunction.exp_power(1.0))
        assert value == pytest.approx(3.0 / math.log(2.0), rel=1e-10)

    def test_power_one_is_average(self):
        f = _make_line() + 3.0
        assert orlicz_local_norm(f, Cube((-1.0,), 2.0), YoungFunction.power(1.0)) == pytest.approx(3.0, rel=1e-10)

    def test_l_log_l_against_root_oracle(self):
        grid = _make_line()
        f = indicator(grid, Cube((0.0,), 1.0)) - indicator(grid, Cube((1.0,), 1.0))
        value = orlicz_local_norm(f, Cube((0.0,), 2.0), YoungFunction.l_log_l())
        oracle = optimize.brentq(lambda lam: (1.0 / lam) * math.log(math.e + 1.0 / lam) - 1.0, 0.5, 10.0, xtol=1e-14)
        assert value == pytest.approx(oracle, rel=1e-9)


class TestChiBallNorm:
    def test_lorentz_closed_form(self):
        result = chi_ball_norm(SpaceDescriptor.lorentz(2, 1), (0.0,), 0.5)
        assert result.value == pytest.approx(2.0)
        assert not result.equivalent

    def test_lebesgue_closed_form(self):
        assert chi_ball_norm(SpaceDescriptor.lebesgue(3), (0.0,), 1.0).value == pytest.approx(2.0 ** (1 / 3))
        assert unit_ball_volume(2) == pytest.approx(math.pi)

    def test_variable_is_equivalent(self):
        grid = make_grid(1, 256, 4.0)
        result = chi_ball_norm(SpaceDescriptor.variable(grid + 2.0), (0.0,), 0.5)
        assert result.equivalent
        assert result.value == pytest.approx(1.0)

    def test_rasterized_lorentz_close_to_closed_form(self):
        grid = make_grid(1, 1024, 4.0)
        X = SpaceDescriptor.lorentz(2, 2)
        chi = indicator(grid, Ball((0.1,), 0.7))
        closed = chi_ball_norm(X, (0.1,), 0.7).value
        assert space_norm(chi, X) == pytest.approx(closed, rel=0.02)

    def test_lebesgue_grid_switches_to_rasterized(self):
        grid = make_grid(1, 32, 8.0)
        X = SpaceDescriptor.lebesgue(2)
        closed = chi_ball_norm(X, (0.1,), 0.3)
        assert closed.value == pytest.approx(math.sqrt(0.6), rel=1e-12)
        rasterized = chi_ball_norm(X, (0.1,), 0.3, grid=grid)
        assert rasterized.value == pytest.approx(space_norm(indicator(grid, Ball((0.1,), 0.3)), X), rel=1e-12)
        assert rasterized.value != pytest.approx(closed.value, rel=1e-3)

    def test_nonpositive_radius(self):
        with pytest.raises(ValueError):
            chi_ball_norm(SpaceDescriptor.lebesgue(2), (0.0,), 0.0)


class TestExponentDiagnostics:
    def test_constant_exponent_log_holder(self):
        c1, c2, p_inf = log_holder_constant(_make_line() + 2.5)
        assert c1 == 0.0
        assert c2 == 0.0
        assert p_inf == pytest.approx(2.5)

    def test_smooth_exponent_is_stable(self):
        coarse = make_grid(1, 64, 4.0).sample(lambda x: 2.0 + np.exp(-x ** 2))
        fine = make_grid(1, 256, 4.0).sample(lambda x: 2.0 + np.exp(-x ** 2))
        c1_coarse, _, _ = log_holder_constant(coarse)
        c1_fine, _, _ = log_holder_constant(fine)
        assert math.isfinite(c1_fine)
        assert c1_fine <= 2.0 * c1_coarse

    def test_jump_grows_under_refinement(self):
        coarse = _make_two_branch_exponent(make_grid(1, 32, 4.0))
        fine = _make_two_branch_exponent(make_grid(1, 512, 4.0))
        assert log_holder_constant(fine)[0] > log_holder_constant(coarse)[0]

    def test_harmonic_mean(self):
        grid = _make_line()
        p = _make_two_branch_exponent(grid)
        # ball (-0.5, 0.5) holds two cells of each branch
        expected = 1.0 / ((0.5 + 1.0 / 3.0) / 2.0)
        assert harmonic_mean_exponent(p, Ball((0.0,), 0.5)) == pytest.approx(expected)

    def test_harmonic_product_defect_vanishes(self):
        grid = _make_line()
        p1 = grid.sample(lambda x: 2.0 + np.abs(x))
        p2 = grid.sample(lambda x: 3.0 + np.sin(x) ** 2)
        assert harmonic_product_defect([p1, p2], Ball((0.3,), 1.7)) < 1e-12


class TestMorrey:
    def test_chi_normalized_ratio_is_one(self):
        f = _make_line() + 1.0
        X = SpaceDescriptor.lebesgue(2)
        u = MorreyWeight.chi_norm_power(X, 1.0)
        assert morrey_norm(f, X, u, _make_interior_family()).value == pytest.approx(1.0)

    def test_power_radius_indicator(self):
        f = _make_unit_indicator()
        u = MorreyWeight.power_radius(1, 2)
        family = BallFamily(((0.5,),), (0.25, 0.5, 1.0))
        assert morrey_norm(f, SpaceDescriptor.lebesgue(2), u, family).value == pytest.approx(math.sqrt(2.0))

    def test_zero_function(self):
        u = MorreyWeight.power_radius(1, 2)
        assert morrey_norm(_make_line(), SpaceDescriptor.lebesgue(2), u, _make_interior_family()).value == 0.0

    def test_classical_lambda_zero_is_lebesgue(self):
        f = _make_unit_indicator()
        family = BallFamily(((0.5,),), (0.25, 1.0))
        assert classical_morrey_norm(f, 2, 0.0, family).value == pytest.approx(1.0)

    def test_classical_constant_function(self):
        f = _make_line() + 1.0
        assert classical_morrey_norm(f, 2, 1.0, _make_interior_family()).value == pytest.approx(math.sqrt(2.0))

    def test_nonpositive_weight_raises(self):
        u = MorreyWeight.tabulated([((0.0,), 0.25, 0.0)])
        family = BallFamily(((0.0,),), (0.25,))
        with pytest.raises(ValueError):
            morrey_norm(_make_unit_indicator(), SpaceDescriptor.lebesgue(2), u, family)

    def test_weight_round_trip(self):
        u = MorreyWeight.product([MorreyWeight.power_radius(1, 2), MorreyWeight.constant(3.0)])
        v = MorreyWeight.from_dict(u.to_dict())
        assert u((0.0,), 4.0) == pytest.approx(6.0)
        assert v((0.0,), 4.0) == pytest.approx(6.0)

    def test_admissibility(self):
        assert morrey_lorentz_admissible([4, 4], [2, 2], 0.4, 1)
        assert not morrey_lorentz_admissible([4, 4], [2, 2], 0.5, 1)

    def test_dyadic_family(self):
        family = BallFamily.dyadic(make_grid(1, 8, 8.0), center_stride=2)
        assert family.radii == (1.0, 2.0, 4.0, 8.0)
        assert len(family.centers) == 5


class TestBlockNorm:
    def test_smallest_covering_ball(self):
        f = _make_unit_indicator()
        family = BallFamily(((0.5,),), (0.25, 0.5, 1.0, 2.0))
        estimate = block_norm_upper_bound(f, SpaceDescriptor.lebesgue(2), MorreyWeight.power_radius(1, 2), family)
        assert estimate.radius == 0.5
        assert estimate.value == pytest.approx(math.sqrt(0.5))

    def test_valid_block_has_norm_one(self):
        f = _make_unit_indicator() * math.sqrt(2.0)
        u = MorreyWeight.power_radius(1, 2)
        family = BallFamily(((0.5,),), (0.5,))
        estimate = block_norm_upper_bound(f, SpaceDescriptor.lebesgue(2), u, family)
        assert estimate.value == pytest.approx(1.0)

    def test_zero_function(self):
        estimate = block_norm_upper_bound(_make_line(), SpaceDescriptor.lebesgue(2), MorreyWeight.constant(), _make_interior_family())
        assert estimate.value == 0.0

    def test_uncovered_support_raises(self):
        family = BallFamily(((3.0,),), (0.25,))
        with pytest.raises(ValueError):
            block_norm_upper_bound(_make_unit_indicator(), SpaceDescriptor.lebesgue(2), MorreyWeight.constant(), family)


class TestWxAlphaCheck:
    SAMPLES = [((0.0,), 0.5), ((1.0,), 1.0), ((-0.5,), 0.25)]

    def test_admissible_power_radius_passes(self):
        verdict = wx_alpha_check(MorreyWeight.power_radius(0.25, 1), SpaceDescriptor.lorentz(2, 1), 0.0, self.SAMPLES)
        assert verdict.passed
        assert verdict.constant is not None and verdict.constant > 0

    def test_inadmissible_power_radius_diverges(self):
        verdict = wx_alpha_check(MorreyWeight.power_radius(1.0, 1), SpaceDescriptor.lorentz(2, 1), 0.0, self.SAMPLES)
        assert verdict.status == "fail"
        assert verdict.reason == "divergent"

    def test_constant_weight_on_lebesgue_passes(self):
        verdict = wx_alpha_check(MorreyWeight.constant(), SpaceDescriptor.lebesgue(2), 0.0, self.SAMPLES)
        assert verdict.passed
        # sum_j 2^{-(j+1)/2}
        assert verdict.constant == pytest.approx(1.0 / (math.sqrt(2.0) - 1.0), rel=1e-9)

    def test_short_truncation_rejected(self):
        with pytest.raises(ValueError):
            wx_alpha_check(MorreyWeight.constant(), SpaceDescriptor.lebesgue(2), 0.0, self.SAMPLES, terms=4)
        with pytest.raises(ValueError):
            wx_alpha_check(MorreyWeight.constant(), SpaceDescriptor.lebesgue(2), 0.0, [])

    @pytest.mark.parametrize("u, X", [
        (MorreyWeight.constant(), SpaceDescriptor.lebesgue(2)),
        (MorreyWeight.power_radius(0.25, 1), SpaceDescriptor.lorentz(2, 1)),
        (MorreyWeight.power_radius(0.5, 3), SpaceDescriptor.lebesgue(3)),
    ])
    def test_verdict_is_monotone_in_alpha(self, u, X):
        # the series grows with alpha, so passing alphas form an initial segment
        alphas = np.linspace(0.0, 1.5, 31)
        passed = [wx_alpha_check(u, X, float(a), self.SAMPLES).passed for a in alphas]
        assert passed[0]
        assert not passed[-1]
        first_miss = passed.index(False)
        assert not any(passed[first_miss:])


class TestWxDeltaCheck:
    SAMPLES = [((0.0,), 0.5), ((1.0,), 1.0), ((-0.5,), 0.25)]

    def test_admissible_weight_passes_with_geometric_constant(self):
        # L^4 with delta = 1/2: (X^delta)' = L^2, terms 2^{-(j+1)/4} 2^{(j+1)/8}
        verdict = wx_delta_check(MorreyWeight.power_radius(0.5, 4), SpaceDescriptor.lebesgue(4), 0.5, self.SAMPLES)
        assert verdict.passed
        assert verdict.condition1_constant is None
        rho = 2.0 ** (-1.0 / 8.0)
        assert verdict.constant == pytest.approx(rho / (1.0 - rho), rel=1e-9)

    def test_inadmissible_weight_diverges(self):
        verdict = wx_delta_check(MorreyWeight.power_radius(2.0, 4), SpaceDescriptor.lebesgue(4), 0.5, self.SAMPLES)
        assert verdict.status == "fail"
        assert verdict.reason == "divergent"

    def test_lorentz_boundary(self):
        # L^{4,2} with delta = 1/2: threshold lam < p delta - 1 = 1
        X = SpaceDescriptor.lorentz(4, 2)
        assert wx_delta_check(MorreyWeight.power_radius(0.9, 4), X, 0.5, self.SAMPLES).passed
        assert wx_delta_check(MorreyWeight.power_radius(1.25, 4), X, 0.5, self.SAMPLES).status == "fail"

    def test_delta_one_matches_associate(self):
        # delta = 1 on L^2: terms (r / 2^{j+1} r)^{1/2}
        verdict = wx_delta_check(MorreyWeight.constant(), SpaceDescriptor.lebesgue(2), 1.0, self.SAMPLES)
        assert verdict.constant == pytest.approx(1.0 / (math.sqrt(2.0) - 1.0), rel=1e-9)

    def test_validation(self):
        u = MorreyWeight.constant()
        with pytest.raises(ValueError):
            wx_delta_check(u, SpaceDescriptor.lebesgue(2), 0.0, self.SAMPLES)
        with pytest.raises(ValueError):
            wx_delta_check(u, SpaceDescriptor.lebesgue(2), 1.5, self.SAMPLES)
        with pytest.raises(ValueError):
            wx_delta_check(u, SpaceDescriptor.lebesgue(2), 0.5, self.SAMPLES, terms=4)
        with pytest.raises(InadmissibleSpaceError):
            wx_delta_check(u, SpaceDescriptor.lebesgue(2), 0.25, self.SAMPLES)
        with pytest.raises(InadmissibleSpaceError):
            wx_delta_check(u, SpaceDescriptor.orlicz(YoungFunction.power(2.0)), 0.5, self.SAMPLES)


class TestHolderPairing:
    @staticmethod
    def _pair(seed: int):
        rng = np.random.default_rng(seed)
        grid = _make_line()
        return grid.with_values(rng.normal(size=32)), grid.with_values(rng.uniform(-2.0, 2.0, size=32))

    @pytest.mark.parametrize("X", [
        SpaceDescriptor.lebesgue(2),
        SpaceDescriptor.lebesgue(3, weight=_make_line() + 2.0),
        SpaceDescriptor.lorentz(3, 2),
        SpaceDescriptor.lorentz(2, 1),
        SpaceDescriptor.variable(_make_two_branch_exponent(_make_line())),
        SpaceDescriptor.orlicz(YoungFunction.power(3.0)),
    ])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_pairing_bound(self, X, seed):
        f, g = self._pair(seed)
        lhs = math.fsum(np.abs(f.values * g.values)) * f.cell_volume
        rhs = X.pairing_constant() * space_norm(f, X) * space_norm(g, X.associate())
        assert lhs <= rhs * (1 + 1e-12)

    def test_lebesgue_equality_for_equal_functions(self):
        f, _ = self._pair(3)
        X = SpaceDescriptor.lebesgue(2)
        lhs = math.fsum(f.values ** 2) * f.cell_volume
        assert lhs == pytest.approx(space_norm(f, X) * space_norm(f, X.associate()), rel=1e-12)


class TestBmo:
    def test_constant_has_zero_oscillation(self):
        b = _make_line() + 2.0
        assert bmo_norm(b, [Cube((-1.0,), 2.0), Cube((0.0,), 0.5)]) == 0.0

    def test_indicator_half(self):
        b = _make_unit_indicator()
        assert bmo_norm(b, [Cube((0.0,), 2.0)]) == pytest.approx(0.5)
        value, cube = bmo_norm_with_cube(b, [Cube((2.0,), 1.0), Cube((0.0,), 2.0)])
        assert cube == Cube((0.0,), 2.0)
        assert value == pytest.approx(0.5)

    def test_empty_family_raises(self):
        with pytest.raises(ValueError):
            bmo_norm(_make_unit_indicator(), [])

    def test_outside_cube_is_skipped(self):
        assert mean_oscillation(_make_unit_indicator(), Cube((40.0,), 1.0)) is None

    def test_log_is_stable_under_refinement(self):
        def log_abs(x):
            return np.log(np.maximum(np.abs(x), 1e-12))

        values = []
        for cells in (256, 1024):
            b = make_grid(1, cells, 4.0).sample(log_abs)
            cubes = [Cube((-s / 2,), s) for s in (0.25, 0.5, 1.0, 2.0)]
            values.append(bmo_norm(b, cubes))
        assert values[1] == pytest.approx(values[0], rel=0.1)

    def test_sharp_maximal(self):
        f = _make_unit_indicator()
        sharp = sharp_maximal(f, [Cube((0.0,), 2.0), Cube((-2.0,), 1.0)])
        assert sharp.values[f.cell_of((0.5,))] >= 0.5
        assert sharp_maximal(f.zeros() + 1.0, [Cube((0.0,), 2.0)]).is_zero()
