import math

import numpy as np
import pytest

from conftest import riemann
from rmshift.densities import DensityModel
from rmshift.errors import AdmissibilityError, DomainError, NumericError
from rmshift.quadrature import quadrature
from rmshift.shapes import (ShapeFunction, asymptotic_variance, fourier_first,
                            mean_field_phi, shape_eval, variance_functional)

COS = ShapeFunction.cosine(1.0)
MIX = ShapeFunction("cosine_mix", (0.0, 1.0, 0.3))
UNIFORM = DensityModel()
TWO_PI = 2 * math.pi


class TestQuadrature:
    def test_constant(self):
        assert quadrature(lambda x: 1.0, -0.5, 0.5) == pytest.approx(1.0, abs=1e-14)

    def test_odd(self):
        assert abs(quadrature(lambda x: x, -0.5, 0.5)) <= 1e-15

    def test_cos_squared(self):
        oracle = riemann(lambda x: np.cos(TWO_PI * x) ** 2)
        value = quadrature(lambda x: math.cos(TWO_PI * x) ** 2, -0.5, 0.5)
        assert abs(value - 0.5) <= 1e-10
        assert abs(value - oracle) <= 1e-8

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            quadrature(lambda x: x, 1.0, 0.0)

    def test_depth_failure_keeps_partial(self):
        with pytest.raises(NumericError) as info:
            quadrature(lambda x: math.sin(1.0 / x) if x else 0.0, 0.0, 1.0,
                       tol=1e-14, max_depth=8)
        assert info.value.partial is not None and math.isfinite(info.value.partial)


class TestShapeEval:
    def test_values(self):
        assert shape_eval(COS, 0.0) == 1.0
        assert abs(shape_eval(COS, 0.25)) <= 1e-15
        assert abs(shape_eval(COS, 1.25)) <= 1e-15

    def test_non_finite(self):
        with pytest.raises(DomainError):
            shape_eval(COS, math.inf)

    def test_periodic_wrap(self, rng):
        x = rng.uniform(-0.5, 0.5, 1000)
        k = rng.integers(-50, 50, 1000)
        for xi, ki in zip(x, k):
            assert abs(shape_eval(MIX, xi) - shape_eval(MIX, xi + ki)) <= 1e-12

    def test_symmetric(self, rng):
        for xi in rng.uniform(-3, 3, 1000):
            assert abs(shape_eval(MIX, xi) - shape_eval(MIX, -xi)) <= 1e-12

    def test_bound(self):
        grid = np.linspace(-0.5, 0.5, 10_000)
        assert np.all(np.abs(MIX(grid)) <= MIX.bound + 1e-15)

    def test_vectorised_agrees(self, rng):
        x = rng.uniform(-2, 2, 100)
        np.testing.assert_allclose(MIX(x), [shape_eval(MIX, v) for v in x], atol=1e-13)

    def test_cosine_family_rejects_mix(self):
        with pytest.raises(DomainError):
            ShapeFunction("cosine", (0, 1, 2))


class TestFourierFirst:
    def test_cosine(self):
        assert abs(fourier_first(COS) - riemann(lambda x: np.cos(TWO_PI * x) ** 2)) <= 1e-8
        assert fourier_first(COS) == pytest.approx(0.5, abs=1e-10)

    def test_constant(self):
        assert abs(fourier_first(ShapeFunction("cosine_mix", (2.0,)))) <= 1e-12

    def test_mix_orthogonality(self):
        oracle = riemann(lambda x: np.cos(TWO_PI * x) * MIX(x))
        assert abs(fourier_first(MIX) - 0.5) <= 1e-10
        assert abs(fourier_first(MIX) - oracle) <= 1e-8


class TestMeanField:
    def test_values(self):
        assert mean_field_phi(0.1, 0.1, 0.5) == 0.0
        assert mean_field_phi(0.1 - 0.25, 0.1, 0.5) == pytest.approx(0.5, abs=1e-15)
        assert mean_field_phi(0.0, 0.1, 0.5) == pytest.approx(0.29389262614623657, abs=1e-15)

    @pytest.mark.parametrize("f1", [0.5, -0.3])
    def test_points_towards_theta(self, f1, rng):
        theta = 0.07
        for d in rng.uniform(-0.5, 0.5, 1000):
            if 1e-9 < abs(d) < 0.5:
                assert d * mean_field_phi(theta + d, theta, f1) * math.copysign(1, f1) < 0


class TestVarianceFunctional:
    def test_uniform_with_noise(self):
        oracle = riemann(lambda x: np.sin(TWO_PI * (x - 0.1)) ** 2
                         * (np.cos(TWO_PI * (x - 0.1)) ** 2 + 0.25))
        value = variance_functional(0.1, 0.1, COS, UNIFORM, 0.5)
        assert abs(value - 0.25) <= 1e-10
        assert abs(value - oracle) <= 1e-8

    def test_uniform_noiseless(self):
        assert variance_functional(0.1, 0.1, COS, UNIFORM, 0.0) == pytest.approx(0.125, abs=1e-10)

    def test_shift_invariance_under_uniform(self):
        a = variance_functional(0.1, 0.1, COS, UNIFORM, 0.5)
        b = variance_functional(0.4, 0.4, COS, UNIFORM, 0.5)
        assert abs(a - b) <= 1e-9

    def test_nonuniform_density(self):
        g = DensityModel("cosine_bump", 0.5)
        oracle = riemann(lambda x: np.sin(TWO_PI * (x - 0.1)) ** 2
                         * (np.cos(TWO_PI * (x - 0.1)) ** 2 + 0.25) / g.pdf(x))
        assert abs(variance_functional(0.1, 0.1, COS, g, 0.5) - oracle) <= 1e-8


class TestAsymptoticVariance:
    def test_canonical(self):
        q = asymptotic_variance(0.1, COS, UNIFORM, 0.5)
        assert q.f1 == pytest.approx(0.5, abs=1e-10)
        assert q.xi2 == pytest.approx(0.25 / (TWO_PI - 1), abs=1e-10)
        assert q.xi2 == pytest.approx(0.047319937777, abs=1e-9)
        assert q.xi2 == pytest.approx(q.phi_at_theta / (4 * math.pi * abs(q.f1) - 1), rel=1e-15)

    def test_noiseless(self):
        q = asymptotic_variance(-0.2, COS, UNIFORM, 0.0)
        assert q.xi2 == pytest.approx(0.125 / (TWO_PI - 1), abs=1e-10)

    def test_inadmissible(self):
        with pytest.raises(AdmissibilityError, match="CLT condition violated"):
            asymptotic_variance(0.0, ShapeFunction.cosine(0.05), UNIFORM, 0.5)

    @pytest.mark.parametrize("amp", [0.5, -0.5])
    def test_positive(self, amp):
        q = asymptotic_variance(0.05, MIX, DensityModel("cosine_bump", amp), 0.1)
        assert q.xi2 > 0
