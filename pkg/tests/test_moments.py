"""Tests for moments: variance, two-time correlation and the Gaussian moment recursion."""

import math

import pytest

from dde.series import chi
from model.errors import QuadratureError
from model.schema import FeedbackConfig
from moments.correlation import (
    central_moment,
    correlation,
    g_function,
    quadrature_moments,
    shifted_moment,
    sigma2,
    sigma2_first_order,
    sigma2_markov,
)
from moments.quadrature import adaptive_simpson


class TestAdaptiveSimpson:

    def test_smooth_integral(self):
        assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)

    def test_kinked_integrand(self):
        value = adaptive_simpson(lambda x: abs(x - 0.3), 0.0, 1.0, knots=[0.3])
        assert value == pytest.approx(0.5 * 0.3 ** 2 + 0.5 * 0.7 ** 2, abs=1e-12)

    def test_reversed_interval(self):
        assert adaptive_simpson(math.exp, 1.0, 0.0) == pytest.approx(1.0 - math.e, abs=1e-10)

    def test_empty_interval(self):
        assert adaptive_simpson(math.exp, 0.4, 0.4) == 0.0

    def test_depth_exhausted(self):
        with pytest.raises(QuadratureError):
            adaptive_simpson(math.sqrt, 0.0, 1.0, tol=1e-15, max_depth=2, rel_tol=0.0)


class TestVariance:

    def test_vacuum_before_the_loop_closes(self, delayed_cfg):
        assert sigma2(0.0, delayed_cfg) == 0.5
        assert sigma2(0.01, delayed_cfg) == 0.5

    def test_no_feedback(self):
        assert sigma2(3.0, FeedbackConfig()) == 0.5

    @pytest.mark.parametrize("k", [0.45, 0.5, 1.0])
    def test_zero_delay_closed_form(self, k):
        cfg = FeedbackConfig.from_k(k)
        for t in (0.1, 0.25, 0.5, 2.0):
            assert sigma2(t, cfg) == pytest.approx(sigma2_markov(t, cfg), abs=1e-10)

    def test_markov_value(self, markov_cfg):
        # k = 1: 1/2 + (e^{gamma t} - 1) / 2
        assert sigma2_markov(0.5, markov_cfg) == pytest.approx(0.5 * math.exp(0.5), rel=1e-14)

    def test_efficiency_scales_the_excess(self):
        ideal = FeedbackConfig.from_k(1.0, tau=0.05)
        lossy = ideal.with_(eta=0.5)
        assert sigma2(0.4, lossy) - 0.5 == pytest.approx(2.0 * (sigma2(0.4, ideal) - 0.5), rel=1e-9)

    def test_first_order_residual_is_quadratic(self):
        def residual(gamma_tau):
            cfg = FeedbackConfig.from_k(1.0, tau=gamma_tau)
            return max(abs(sigma2(t, cfg) - sigma2_first_order(t, cfg)) for t in (0.1, 0.2, 0.3, 0.4, 0.5))

        assert 3.5 <= residual(0.02) / residual(0.01) <= 4.5

    def test_first_order_vacuum_before_tau(self, delayed_cfg):
        assert sigma2_first_order(0.005, delayed_cfg) == 0.5


class TestCorrelation:

    @pytest.mark.parametrize("cfg", [
        FeedbackConfig.from_k(0.45),
        FeedbackConfig.from_k(1.0, tau=0.3),
        FeedbackConfig(g=0.7, theta=0.3, phi=0.2, tau=0.2, eta=0.8),
    ])
    def test_variance_identity(self, cfg):
        # sigma2 = chi^2 / 2 + 2 G(t, t)
        for t in (0.15, 0.7):
            assert sigma2(t, cfg) == pytest.approx(0.5 * chi(t, cfg) ** 2 + 2 * g_function(t, t, cfg), abs=1e-9)

    def test_bare_cavity_noise(self):
        cfg = FeedbackConfig()
        assert g_function(1.0, 1.0, cfg) == pytest.approx(0.25 * (1 - math.exp(-1.0)), abs=1e-11)

    def test_symmetric_in_time_arguments(self):
        cfg = FeedbackConfig(g=0.7, theta=0.3, phi=0.2, tau=0.2, eta=0.8)
        assert g_function(0.5, 0.9, cfg) == pytest.approx(g_function(0.9, 0.5, cfg), abs=1e-11)

    def test_coherent_second_moment(self):
        cfg = FeedbackConfig.from_k(0.45, tau=0.2)
        alpha = 0.6 + 0.2j
        t = 0.5
        expected = (alpha.real ** 2 + 0.25) * chi(t, cfg) ** 2 + g_function(t, t, cfg)
        assert correlation(t, t, (alpha, alpha), cfg) == pytest.approx(expected, abs=1e-12)


class TestMomentRecursion:

    def test_odd_moments_vanish(self, delayed_cfg):
        assert central_moment(3, 0.1, (1j, 1j), delayed_cfg) == 0
        assert shifted_moment(5, 0.1, (1j, -1j), delayed_cfg) == 0

    def test_zeroth_moment_is_overlap(self, delayed_cfg):
        assert central_moment(0, 0.1, (1.0, -1.0), delayed_cfg) == pytest.approx(math.exp(-2.0))

    def test_second_central_moment_is_half_sigma2(self, markov_cfg):
        assert central_moment(2, 0.3, (0.5, 0.5), markov_cfg).real == pytest.approx(0.5 * sigma2(0.3, markov_cfg))

    def test_fourth_central_moment(self, markov_cfg):
        s2 = sigma2(0.3, markov_cfg)
        assert central_moment(4, 0.3, (0.5, 0.5), markov_cfg).real == pytest.approx(0.75 * s2 ** 2)

    def test_shifted_second_moment_is_noise(self, delayed_cfg):
        assert shifted_moment(2, 0.1, (1j, 1j), delayed_cfg).real == pytest.approx(
            g_function(0.1, 0.1, delayed_cfg), rel=1e-12
        )

    def test_negative_order(self, markov_cfg):
        with pytest.raises(ValueError):
            central_moment(-2, 0.1, (0, 0), markov_cfg)

    def test_quadrature_moments_record(self, delayed_cfg):
        record = quadrature_moments(0.05, delayed_cfg)
        assert record.mean_factor == pytest.approx(chi(0.05, delayed_cfg))
        assert record.sigma2 == pytest.approx(sigma2(0.05, delayed_cfg))
        assert record.config == delayed_cfg
