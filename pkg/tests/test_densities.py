import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad

from rmshift.densities import (DensityModel, NoiseModel, density_eval, sample_noise,
                               sample_x)
from rmshift.errors import DomainError

BUMP = DensityModel("cosine_bump", 0.5)
UNIFORM = DensityModel()


def bisect_cdf(d, u):
    lo, hi = -0.5, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if d.cdf(mid) < u:
            lo = mid
        else:
            hi = mid
    return lo


class TestDensityEval:
    def test_values(self):
        assert density_eval(UNIFORM, 0.3) == 1.0
        assert density_eval(BUMP, 0.0) == pytest.approx(1.5, abs=1e-15)
        assert density_eval(BUMP, 0.5) == pytest.approx(0.5, abs=1e-15)
        assert density_eval(BUMP, -0.5) == pytest.approx(0.5, abs=1e-15)

    def test_out_of_support(self):
        with pytest.raises(DomainError):
            density_eval(UNIFORM, 0.51)

    @pytest.mark.parametrize("d", [UNIFORM, BUMP, DensityModel("cosine_bump", -0.9)])
    def test_normalised_and_bounded_below(self, d):
        assert abs(quad(d.pdf, -0.5, 0.5, epsabs=1e-13)[0] - 1.0) <= 1e-10
        grid = np.linspace(-0.5, 0.5, 10_000)
        assert np.all(d.pdf(grid) >= d.min_value - 1e-15)

    def test_min_value(self):
        assert UNIFORM.min_value == 1.0
        assert DensityModel("cosine_bump", -0.3).min_value == pytest.approx(0.7)

    @pytest.mark.parametrize("amp", [1.0, -1.0, 1.5])
    def test_rejects_vanishing_density(self, amp):
        with pytest.raises(DomainError):
            DensityModel("cosine_bump", amp)


class TestSampleX:
    def test_uniform_quantile(self):
        assert sample_x(UNIFORM, 0.25) == -0.25

    @pytest.mark.parametrize("amp", [0.5, -0.7, 0.99])
    def test_median_is_zero(self, amp):
        assert abs(sample_x(DensityModel("cosine_bump", amp), 0.5)) <= 1e-12

    def test_quartile_against_bisection(self):
        # independent bisection on the closed-form CDF gives -0.17835105296346052
        expected = bisect_cdf(BUMP, 0.25)
        assert expected == pytest.approx(-0.17835105296346052, abs=1e-15)
        assert abs(sample_x(BUMP, 0.25) - expected) <= 1e-12

    def test_rejects_bad_draw(self):
        with pytest.raises(DomainError):
            sample_x(BUMP, 1.2)

    @pytest.mark.parametrize("d", [BUMP, DensityModel("cosine_bump", -0.8)])
    def test_cdf_round_trip(self, d, rng):
        u = rng.uniform(0, 1, 1000)
        assert np.max(np.abs(d.cdf(sample_x(d, u)) - u)) <= 1e-10

    def test_chi_square_fit(self, rng):
        x = sample_x(BUMP, rng.uniform(0, 1, 100_000))
        edges = np.linspace(-0.5, 0.5, 51)
        observed, _ = np.histogram(x, edges)
        expected = 100_000 * np.diff(BUMP.cdf(edges))
        assert stats.chisquare(observed, expected).pvalue > 0.001


class TestNoise:
    def test_degenerate(self, rng):
        u = rng.uniform(size=(2, 100))
        assert np.all(sample_noise(NoiseModel("gaussian", 0.0), *u) == 0.0)

    def test_gaussian_variance(self, rng):
        u = rng.uniform(size=(2, 10**6))
        z = sample_noise(NoiseModel("gaussian", 0.5), *u)
        assert 0.2475 <= np.var(z) <= 0.2525

    def test_laplace_mean_and_variance(self, rng):
        u = rng.uniform(size=(2, 10**6))
        z = sample_noise(NoiseModel("laplace", 1.0), *u)
        assert -0.004 <= np.mean(z) <= 0.004
        assert np.var(z) == pytest.approx(1.0, abs=0.01)

    def test_gaussian_shape(self, rng):
        u = rng.uniform(size=(2, 20_000))
        z = sample_noise(NoiseModel("gaussian", 2.0), *u)
        assert stats.kstest(z, "norm", args=(0, 2.0)).pvalue > 0.001

    def test_draw_at_zero_is_finite(self):
        assert math.isfinite(sample_noise(NoiseModel("laplace", 1.0), 0.0, 0.0))
        assert math.isfinite(sample_noise(NoiseModel("gaussian", 1.0), 0.0, 0.0))
