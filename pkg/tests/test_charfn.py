"""Tests for charfn: closed forms, the delay-aligned grid and the exact grid solver."""

import math
from unittest.mock import patch

import numpy as np
import pytest

from charfn.closed_form import (
    SmallTauCoefficients,
    charfn_early,
    charfn_small_tau,
    coherence_function,
    displacement_matrix_element,
    quadrature_weight,
)
from charfn.exact import (
    CharFnKernels,
    CharFnSolver,
    CharFnResult,
    cat_coherence_curve,
    cat_coherence_exact,
    charfn_exact,
    exact_result,
    get_solver,
    hamiltonian_exponent,
)
from charfn.grid import GridPlan, default_step, plan_grid
from model.errors import DomainError, PhaseConventionError, RegimeWarning
from model.schema import FeedbackConfig, overlap

ALPHA = 0.3 + 0.2j
BETA = -0.1 + 0.4j


class TestClosedForms:

    def test_quadrature_weight_is_real(self):
        assert quadrature_weight(1j, math.pi / 2) == pytest.approx(2.0)
        assert quadrature_weight(1.0, 0.0) == pytest.approx(2.0)

    def test_displacement_at_zero_is_overlap(self):
        assert displacement_matrix_element(0j, ALPHA, BETA) == pytest.approx(overlap(BETA, ALPHA))

    def test_early_form_before_the_loop_closes(self):
        # t < tau: bare damping of lambda plus vacuum noise
        cfg = FeedbackConfig.from_k(1.0, tau=0.5)
        lam, t = 0.7 - 0.2j, 0.3
        e = math.exp(-0.5 * t)
        expected = displacement_matrix_element(lam * e, ALPHA, BETA) * math.exp(-0.5 * abs(lam) ** 2 * (1 - e * e))
        assert charfn_early(lam, t, ALPHA, BETA, cfg) == pytest.approx(expected, abs=1e-14)

    def test_early_form_outside_its_segment(self):
        cfg = FeedbackConfig.from_k(1.0, tau=0.01)
        with pytest.raises(DomainError):
            charfn_early(1j, 0.05, 0j, 0j, cfg)

    def test_small_tau_form_needs_two_delays(self):
        cfg = FeedbackConfig.from_k(1.0, tau=0.01)
        with pytest.raises(DomainError):
            charfn_small_tau(1j, 0.01, 0j, 0j, cfg)

    def test_small_tau_form_needs_zero_phase(self):
        with pytest.raises(PhaseConventionError):
            SmallTauCoefficients(FeedbackConfig(g=1.0, theta=1.0, phi=0.3))

    def test_small_tau_finite_at_zero_sine(self):
        coeffs = SmallTauCoefficients(FeedbackConfig(g=1.0, theta=0.0, tau=0.01), 1j, 1j)
        assert math.isfinite(abs(coeffs.C(0.5)))
        assert math.isfinite(abs(coeffs.D(0.5)))

    def test_small_tau_normalized_at_zero_lambda(self, delayed_cfg):
        assert charfn_small_tau(0j, 0.1, ALPHA, BETA, delayed_cfg) == pytest.approx(overlap(BETA, ALPHA), abs=1e-15)


class TestCoherenceFunction:

    @pytest.mark.parametrize("gamma_tau", [0.0, 0.001, 0.01])
    def test_starts_at_one_half(self, gamma_tau):
        cfg = FeedbackConfig.from_k(1.0, tau=gamma_tau)
        assert coherence_function(0.0, 5j, cfg) == pytest.approx(0.5, abs=1e-12)

    def test_delayed_feedback_retards_decoherence(self, delayed_cfg):
        bare = FeedbackConfig()
        for t in (0.03, 0.05, 0.1):
            assert coherence_function(t, 5j, delayed_cfg) > coherence_function(t, 5j, bare)

    def test_bare_cavity_value(self):
        # g = 0: (1/2) exp{-4 |a0|^2 (1 - e^{-gamma t/2})}
        t = 0.04
        expected = 0.5 * math.exp(-100.0 * (1 - math.exp(-0.5 * t)))
        assert coherence_function(t, 5j, FeedbackConfig()) == pytest.approx(expected, rel=1e-12)

    def test_rejects_real_amplitude(self, delayed_cfg):
        with pytest.raises(DomainError):
            coherence_function(0.1, 1 + 5j, delayed_cfg)

    def test_rejects_nonzero_phase(self):
        with pytest.raises(PhaseConventionError):
            coherence_function(0.1, 5j, FeedbackConfig(g=1.0, theta=1.0, phi=0.2))

    def test_rejects_negative_time(self, delayed_cfg):
        with pytest.raises(DomainError):
            coherence_function(-0.1, 5j, delayed_cfg)


class TestGridPlan:

    def test_default_step(self):
        assert default_step(FeedbackConfig(tau=0.08)) == pytest.approx(0.01)
        assert default_step(FeedbackConfig()) == pytest.approx(1 / 64)

    def test_commensurate_plan(self):
        cfg = FeedbackConfig.from_k(1.0, tau=0.3)
        plan = plan_grid(cfg, 1.0)
        assert plan.m * plan.step == pytest.approx(0.3, rel=1e-12)
        assert plan.t_end == pytest.approx(1.0, rel=1e-12)
        assert plan.step <= default_step(cfg) + 1e-15

    def test_zero_delay_plan(self):
        plan = plan_grid(FeedbackConfig.from_k(1.0), 0.5, max_step=0.01)
        assert plan.m == 0
        assert plan.n == 50

    def test_incommensurate_time_is_snapped(self):
        cfg = FeedbackConfig.from_k(1.0, tau=0.1)
        with pytest.warns(RegimeWarning):
            plan = plan_grid(cfg, 0.1 * math.pi)
        assert plan.t_end == pytest.approx(0.1 * math.pi, rel=1e-6)

    def test_refined(self):
        plan = GridPlan(step=0.01, m=3, n=10)
        fine = plan.refined()
        assert (fine.step, fine.m, fine.n) == (0.005, 6, 20)
        assert fine.t_end == pytest.approx(plan.t_end)


class TestExactCharFn:

    @pytest.mark.parametrize("cfg", [
        FeedbackConfig.from_k(1.0, tau=0.2),
        FeedbackConfig(g=0.7, theta=0.3, phi=0.2, tau=0.2, eta=0.8),
    ])
    def test_normalized_at_zero_lambda(self, cfg):
        for t in (0.1, 0.5):
            assert charfn_exact(0j, t, ALPHA, BETA, cfg) == pytest.approx(overlap(BETA, ALPHA), abs=1e-12)

    def test_no_feedback_reduces_to_damping(self):
        cfg = FeedbackConfig(tau=0.3)
        lam, t = 0.8 - 0.3j, 0.9
        e = math.exp(-0.5 * t)
        expected = displacement_matrix_element(lam * e, ALPHA, BETA) * math.exp(-0.5 * abs(lam) ** 2 * (1 - e * e))
        assert charfn_exact(lam, t, ALPHA, BETA, cfg) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("t", [0.0075, 0.01])
    def test_continuous_with_early_segment(self, t):
        cfg = FeedbackConfig.from_k(1.0, tau=0.005)
        exact = charfn_exact(2j, t, 1j, 1j, cfg)
        assert abs(exact - charfn_early(2j, t, 1j, 1j, cfg)) < 1e-8

    def test_zero_delay_matches_closed_form(self, markov_cfg):
        exact = charfn_exact(1j, 0.1, 0.5j, 0.5j, markov_cfg)
        assert abs(exact - charfn_small_tau(1j, 0.1, 0.5j, 0.5j, markov_cfg)) < 1e-6

    @pytest.mark.slow
    def test_small_tau_residual_is_second_order(self):
        def residual(gamma_tau):
            cfg = FeedbackConfig.from_k(1.0, tau=gamma_tau)
            return abs(charfn_exact(2j, 0.1, 1j, 1j, cfg) - charfn_small_tau(2j, 0.1, 1j, 1j, cfg))

        assert 3.5 <= residual(0.005) / residual(0.0025) <= 4.5

    @pytest.mark.parametrize("t", [0.1, 0.5])
    def test_hermitian_under_swap(self, t):
        # <b|D(l)|a>* = <a|D(-l)|b>
        cfg = FeedbackConfig(g=0.7, theta=0.3, phi=0.2, tau=0.2, eta=0.8)
        lam = 0.8 - 0.3j
        forward = charfn_exact(lam, t, ALPHA, BETA, cfg)
        backward = charfn_exact(-lam, t, BETA, ALPHA, cfg)
        assert forward.conjugate() == pytest.approx(backward, abs=1e-12)

    def test_negative_time(self, delayed_cfg):
        with pytest.raises(DomainError):
            charfn_exact(1j, -0.1, 0j, 0j, delayed_cfg)

    def test_result_provenance(self, delayed_cfg):
        result = exact_result(1j, 0.05, 1j, 1j, delayed_cfg)
        assert result.branch == "exact"
        assert result.t == pytest.approx(0.05)
        assert result.value == pytest.approx(np.exp(result.log_value))
        assert not result.underflow

    def test_underflow_is_flagged(self):
        result = CharFnResult.from_log(0.1, -800.0 + 0.3j, "exact")
        assert result.underflow
        assert result.value == 0j
        assert result.log_value.real == -800.0

    def test_cat_curve_matches_pointwise(self, delayed_cfg, clean_registries):
        ts, values = cat_coherence_curve(0.03, 2j, delayed_cfg)
        assert ts[-1] == pytest.approx(0.03)
        assert values[-1] == pytest.approx(cat_coherence_exact(0.03, 2j, delayed_cfg), abs=1e-12)

    def test_solver_registry(self, delayed_cfg, clean_registries):
        assert get_solver(delayed_cfg, 0.05) is get_solver(delayed_cfg, 0.05)
        assert get_solver(delayed_cfg, 0.05) is not get_solver(delayed_cfg, 0.05, max_step=1e-4)


class TestExponent:

    def test_vanishes_at_zero_lambda(self, delayed_cfg):
        assert hamiltonian_exponent(0.05, 0j, ALPHA, BETA, delayed_cfg) == pytest.approx(0j, abs=1e-14)

    def test_is_the_log_derivative_without_feedback(self):
        cfg = FeedbackConfig(tau=0.3)
        lam, t, h = 0.8 - 0.3j, 0.6, 1e-5
        numeric = (
            exact_result(lam, t + h, ALPHA, BETA, cfg).log_value
            - exact_result(lam, t - h, ALPHA, BETA, cfg).log_value
        ) / (2 * h)
        assert hamiltonian_exponent(t, lam, ALPHA, BETA, cfg) == pytest.approx(numeric, abs=1e-7)

    def test_reuses_the_registered_solver(self, delayed_cfg, clean_registries):
        with patch("charfn.exact.CharFnSolver", wraps=CharFnSolver) as built:
            first = hamiltonian_exponent(0.05, 1j, ALPHA, BETA, delayed_cfg)
            second = hamiltonian_exponent(0.05, 1j, ALPHA, BETA, delayed_cfg)
            solver = get_solver(delayed_cfg, 0.05)
        assert built.call_count == 1
        assert first == second
        assert isinstance(solver, CharFnSolver)

    def test_profile_domain(self, delayed_cfg):
        kernels = CharFnKernels(delayed_cfg)
        with pytest.raises(DomainError):
            kernels.W(1j, 0.05, 0.05)
