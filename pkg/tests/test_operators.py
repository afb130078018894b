"""
Tests for operators/ — Hilbert and rough kernels, the bilinear model, commutators,
operator descriptors and the W_r / John-Nirenberg checks.
"""
import math

import numpy as np
import pytest

from grid.core import Cube, GridMismatchError, indicator, make_grid
from maximal.families import CubeFamilySpec
from maximal.operators import hl_maximal, multilinear_maximal
from operators.checks import john_nirenberg_check, wr_property_check
from operators.kernels import (
    OperatorDescriptor,
    bilinear_operator,
    check_omega,
    commutator_iterated,
    hilbert_transform,
    multilinear_commutator,
    rough_homogeneous,
)
from sparse.family import build_lattice_families
from sparse.forms import sparse_operator
from sparse.lattice import DyadicLattice


def _make_random(seed: int, dim: int = 1, cells: int = 16, extent: float = 4.0):
    rng = np.random.default_rng(seed)
    grid = make_grid(dim, cells, extent)
    return grid.with_values(rng.normal(size=grid.shape))


def _bilinear_oracle(f1, f2, i):
    """Explicit double sum of the bilinear model at cell i."""
    x = f1.axes()[0]
    h = f1.spacing
    total = 0.0
    for j1 in range(f1.size):
        for j2 in range(f1.size):
            if j1 == i or j2 == i:
                continue
            d1, d2 = x[i] - x[j1], x[i] - x[j2]
            kernel = np.sign(d1) * np.sign(d2) / (abs(d1) + abs(d2)) ** 2
            total += kernel * f1.values[j1] * f2.values[j2] * h * h
    return total


class TestHilbertTransform:
    def test_zero(self):
        assert hilbert_transform(make_grid(1, 16, 4.0)).is_zero()

    def test_even_input_gives_odd_output(self):
        grid = make_grid(1, 32, 4.0)
        f = indicator(grid, Cube((-0.5,), 1.0))
        hf = hilbert_transform(f).values
        assert np.allclose(hf, -hf[::-1], atol=1e-12)

    def test_far_field_matches_closed_form(self):
        grid = make_grid(1, 128, 8.0)
        f = indicator(grid, Cube((0.0,), 1.0))
        i = grid.cell_of((3.0,))
        x = grid.axes()[0][i[0]]
        expected = math.log(x / (x - 1.0)) / math.pi
        assert hilbert_transform(f).values[i] == pytest.approx(expected, rel=1e-3)

    def test_linear(self):
        f, g = _make_random(20, cells=32), _make_random(21, cells=32)
        combined = hilbert_transform(f * 2.5 + g * -0.75).values
        assert np.allclose(combined, 2.5 * hilbert_transform(f).values - 0.75 * hilbert_transform(g).values, atol=1e-12)

    def test_needs_one_dimension(self):
        with pytest.raises(GridMismatchError):
            hilbert_transform(make_grid(2, 4, 1.0))


class TestRoughHomogeneous:
    def test_zero_omega(self):
        f = _make_random(0, dim=2, cells=8)
        assert rough_homogeneous(f, "zero").is_zero()

    def test_omega_validation(self):
        with pytest.raises(ValueError):
            check_omega(lambda t1, t2: np.ones_like(t1))
        with pytest.raises(ValueError):
            check_omega("unknown")
        assert check_omega("cos2") is not None

    def test_needs_two_dimensions(self):
        with pytest.raises(GridMismatchError):
            rough_homogeneous(_make_random(0), "sign1")

    @pytest.mark.parametrize("omega", ["sign1", "cos2"])
    def test_linear(self, omega):
        f, g = _make_random(22, dim=2, cells=8), _make_random(23, dim=2, cells=8)
        combined = rough_homogeneous(f * -1.5 + g * 3.0, omega).values
        expected = -1.5 * rough_homogeneous(f, omega).values + 3.0 * rough_homogeneous(g, omega).values
        assert np.allclose(combined, expected, atol=1e-12)

    def test_sign_kernel_is_odd_in_first_axis(self):
        grid = make_grid(2, 8, 2.0)
        f = indicator(grid, Cube((-0.5, -0.5), 1.0))
        tf = rough_homogeneous(f, "sign1").values
        assert np.allclose(tf, -tf[::-1, :], atol=1e-12)


class TestCommutators:
    def test_constant_symbol_vanishes(self):
        f = _make_random(1)
        b = f.zeros() + 3.0
        assert commutator_iterated(OperatorDescriptor.hilbert(), b, 1, f).is_zero()
        assert commutator_iterated(OperatorDescriptor.hilbert(), b, 3, f).is_zero()
        g = _make_random(2, dim=2, cells=8)
        assert commutator_iterated(OperatorDescriptor.rough("sign2"), g.zeros() + 1.0, 2, g).is_zero()

    def test_linear_symbol_gives_averaging(self):
        # (b(x) - b(y)) / (pi (x - y)) = 1/pi for b(x) = x
        f = _make_random(3)
        b = f.sample(lambda x: x)
        out = commutator_iterated(OperatorDescriptor.hilbert(), b, 1, f).values
        expected = (f.values.sum() - f.values) * f.spacing / math.pi
        assert np.allclose(out, expected, rtol=1e-10, atol=1e-12)

    def test_first_order_hilbert_is_b_tf_minus_t_bf(self):
        f = _make_random(24, cells=32)
        b = f.sample(lambda x: np.sin(x))
        out = commutator_iterated(OperatorDescriptor.hilbert(), b, 1, f).values
        expected = b.values * hilbert_transform(f).values - hilbert_transform(b * f).values
        assert np.allclose(out, expected, rtol=1e-10, atol=1e-12)

    def test_first_order_rough_is_b_tf_minus_t_bf(self):
        f = _make_random(25, dim=2, cells=8)
        b = _make_random(26, dim=2, cells=8)
        out = commutator_iterated(OperatorDescriptor.rough("sign1"), b, 1, f).values
        expected = b.values * rough_homogeneous(f, "sign1").values - rough_homogeneous(b * f, "sign1").values
        assert np.allclose(out, expected, rtol=1e-10, atol=1e-12)

    def test_scale_carries_through(self):
        f = _make_random(4)
        b = f.sample(lambda x: x ** 2)
        T = OperatorDescriptor.hilbert()
        assert np.allclose(T.scaled(2.0).commutator(b, 1, f).values, 2.0 * T.commutator(b, 1, f).values)

    def test_validation(self):
        f = _make_random(5)
        with pytest.raises(ValueError):
            commutator_iterated(OperatorDescriptor.hilbert(), f, 0, f)
        with pytest.raises(ValueError):
            commutator_iterated(OperatorDescriptor.identity(), f, 1, f)


class TestBilinearModel:
    def test_matches_double_sum(self):
        grid = make_grid(1, 16, 8.0)
        chi = indicator(grid, Cube((0.0,), 1.0))
        out = bilinear_operator(chi, chi)
        i = grid.cell_of((3.0,))[0]
        assert out.values[i] == pytest.approx(_bilinear_oracle(chi, chi, i), rel=1e-12)

    def test_zero_argument(self):
        f = _make_random(6)
        assert bilinear_operator(f.zeros(), f).is_zero()

    def test_constant_symbols_vanish(self):
        f1, f2 = _make_random(7), _make_random(8)
        b = f1.zeros() + 2.0
        assert multilinear_commutator((f1, f2), (b,), (0,)).is_zero()
        assert multilinear_commutator((f1, f2), (b, b), (0, 1)).is_zero()

    def test_validation(self):
        f = _make_random(9)
        with pytest.raises(ValueError):
            multilinear_commutator((f,))
        with pytest.raises(ValueError):
            multilinear_commutator((f, f), (f,), ())
        with pytest.raises(ValueError):
            multilinear_commutator((f, f), (f, f), (0, 0))


class TestOperatorDescriptor:
    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            OperatorDescriptor("riesz")
        with pytest.raises(ValueError):
            OperatorDescriptor.sparse([])

    def test_identity_and_scaling(self):
        f = _make_random(10)
        assert np.array_equal(OperatorDescriptor.identity().apply(f).values, f.values)
        doubled = OperatorDescriptor.identity().scaled(2.0)
        assert np.array_equal(doubled(f).values, 2.0 * f.values)
        assert doubled.label == "2*identity"
        assert OperatorDescriptor.rough("cos2").label == "rough[cos2]"

    def test_sparse_realization(self):
        f = _make_random(11)
        families = build_lattice_families(f, DyadicLattice.standard(f), 0.5)
        T = OperatorDescriptor.sparse(families, r=2.0)
        expected = sum((sparse_operator(f, s, 2.0) for s in families), f.zeros())
        assert np.allclose(T.apply(f).values, expected.values)

    def test_multilinear_maximal_realization(self):
        f = abs(_make_random(12))
        spec = CubeFamilySpec.dense()
        T = OperatorDescriptor.multilinear_maximal(spec)
        assert np.allclose(T.apply(f).values, hl_maximal(f, spec).values)
        g = abs(_make_random(13))
        assert np.array_equal(T.apply([f, g]).values, multilinear_maximal([f, g], spec).values)


class TestWrPropertyCheck:
    LAMBDAS = (0.1, 0.25, 0.5, 0.75)

    def test_identity_obeys_chebyshev(self):
        corpus = [_make_random(i) for i in range(4)]
        cubes = [Cube((-2.0,), 4.0), Cube((-1.0,), 1.0), Cube((0.0,), 2.0)]
        profile = wr_property_check(lambda f: f, 1.0, cubes, corpus, self.LAMBDAS)
        assert profile.pairs == 12
        for lam, phi in zip(profile.lambdas, profile.phi):
            assert phi < 1.0 / lam
        assert list(profile.phi) == sorted(profile.phi, reverse=True)

    def test_hilbert_profile_scales_with_operator(self):
        corpus = [_make_random(i, cells=32) for i in range(3)]
        cubes = [Cube((-2.0,), 4.0), Cube((-1.0,), 1.0), Cube((0.5,), 1.5)]
        profile = wr_property_check(hilbert_transform, 1.0, cubes, corpus, self.LAMBDAS)
        doubled = wr_property_check(lambda f: hilbert_transform(f) * 2.0, 1.0, cubes, corpus, self.LAMBDAS)
        assert profile.pairs == 9
        assert all(math.isfinite(phi) and phi > 0 for phi in profile.phi)
        assert list(profile.phi) == sorted(profile.phi, reverse=True)
        assert doubled.phi == pytest.approx(tuple(2.0 * phi for phi in profile.phi), rel=1e-12)

    def test_maximal_operator_never_drops_below_local_average(self):
        # Q is itself a dense cube, so M(f chi_Q) >= <|f|>_Q on Q
        corpus = [_make_random(i) for i in range(4)]
        cubes = [Cube((-2.0,), 4.0), Cube((-1.0,), 1.0), Cube((0.0,), 2.0)]
        profile = wr_property_check(lambda g: hl_maximal(g, CubeFamilySpec.dense()), 1.0, cubes, corpus, self.LAMBDAS)
        assert profile.pairs == 12
        assert all(phi >= 1.0 - 1e-12 for phi in profile.phi)

    def test_zero_local_average_is_skipped(self):
        grid = make_grid(1, 16, 4.0)
        f = indicator(grid, Cube((1.0,), 1.0))
        profile = wr_property_check(lambda g: g, 1.0, [Cube((-2.0,), 1.0), Cube((1.0,), 1.0)], [f], self.LAMBDAS)
        assert profile.skipped == 1
        assert profile.pairs == 1
        assert set(profile.as_dict()) == set(self.LAMBDAS)

    def test_validation(self):
        corpus = [_make_random(0)]
        cubes = [Cube((-1.0,), 1.0)]
        with pytest.raises(ValueError):
            wr_property_check(lambda f: f, 0.5, cubes, corpus, self.LAMBDAS)
        with pytest.raises(ValueError):
            wr_property_check(lambda f: f, 1.0, cubes, corpus, (0.0, 0.5))
        with pytest.raises(ValueError):
            wr_property_check(lambda f: f, 1.0, cubes, [], self.LAMBDAS)


class TestJohnNirenberg:
    ALPHAS = tuple(range(1, 9))

    def test_constant_symbol_is_skipped(self):
        b = make_grid(1, 16, 4.0) + 1.0
        result = john_nirenberg_check(b, [Cube((-1.0,), 1.0)], self.ALPHAS)
        assert result.skipped
        assert result.checked == 0

    def test_indicator_has_no_violations(self):
        grid = make_grid(1, 32, 8.0)
        b = indicator(grid, Cube((0.0,), 1.0))
        cubes = [Cube((0.0,), 2.0), Cube((0.0,), 1.0), Cube((0.5,), 1.0), Cube((1.0,), 1.0)]
        result = john_nirenberg_check(b, cubes, self.ALPHAS, wide_cubes=cubes)
        assert result.norm == pytest.approx(0.5)
        assert result.violations == 0
        assert result.checked == len(cubes) * len(self.ALPHAS)

    def test_log_symbol_has_no_violations(self):
        grid = make_grid(1, 4096, 4.0)
        b = grid.sample(lambda x: np.log(np.maximum(np.abs(x), 1e-12)))
        cubes = [Cube((-s / 2,), s) for s in (0.25, 0.5, 1.0, 2.0)] + [Cube((0.0,), 1.0), Cube((-1.5,), 1.0)]
        result = john_nirenberg_check(b, cubes, self.ALPHAS, wide_cubes=[])
        assert result.violations == 0
        assert result.wide_norm >= result.norm > 0
