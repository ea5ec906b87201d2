"""Tests for trajectories: Wiener paths, closed-form trajectories and the number-basis oracle."""

import math
import os
import tempfile

import numpy as np
import pytest

from model.errors import DomainError, PhaseConventionError, TruncationLeakError
from model.schema import FeedbackConfig
from runs.sweeps import trajectory_ensemble
from trajectories.export import COLUMNS, load_trajectory_npz, write_trajectory_csv, write_trajectory_npz
from trajectories.fock import (
    coherent_fidelity,
    coherent_vector,
    compare_with_closed_form,
    fit_coherent_amplitude,
    fock_sde_oracle,
)
from trajectories.functionals import (
    coherence_trajectory,
    ensemble_coherence,
    f_functions,
    initial_coherence,
    ito_functionals,
    trajectory,
)
from trajectories.paths import WienerPath, generate_path, refine_path


class TestWienerPath:

    def test_same_seed_same_path(self):
        a = generate_path(3, 1e-3, 0.1)
        b = generate_path(3, 1e-3, 0.1)
        np.testing.assert_array_equal(a.increments, b.increments)
        assert a.n_steps == 100

    def test_increment_statistics(self):
        path = generate_path(11, 1e-3, 100.0)
        assert path.increments.mean() == pytest.approx(0.0, abs=5 * math.sqrt(1e-3 / path.n_steps))
        assert path.increments.var() / 1e-3 == pytest.approx(1.0, abs=5 * math.sqrt(2.0 / path.n_steps))

    def test_endpoint_statistics_across_seeds(self):
        n = 4000
        ends = np.array([generate_path(seed, 1e-2, 1.0).cumulative[-1] for seed in range(n)])
        assert ends.mean() == pytest.approx(0.0, abs=5 / math.sqrt(n))
        assert ends.var() == pytest.approx(1.0, abs=5 * math.sqrt(2.0 / n))

    def test_seeds_differ(self):
        assert not np.array_equal(generate_path(0, 1e-3, 0.1).increments, generate_path(1, 1e-3, 0.1).increments)

    def test_longer_path_extends_shorter(self):
        short = generate_path(7, 1e-3, 0.05)
        long = generate_path(7, 1e-3, 0.1)
        np.testing.assert_array_equal(long.increments[: short.n_steps], short.increments)

    def test_cumulative_starts_at_zero(self):
        path = generate_path(0, 1e-3, 0.01)
        assert path.cumulative[0] == 0.0
        assert len(path.cumulative) == path.n_steps + 1
        assert path.t_max == pytest.approx(0.01)

    def test_read_only(self):
        path = generate_path(0, 1e-3, 0.01)
        with pytest.raises(ValueError):
            path.increments[0] = 1.0

    def test_refined_path_passes_through_coarse_nodes(self):
        path = generate_path(5, 1e-3, 0.05)
        fine = refine_path(path)
        assert fine.dt == pytest.approx(5e-4)
        assert fine.level == 1
        np.testing.assert_allclose(fine.cumulative[::2], path.cumulative, atol=1e-13)

    def test_refine_needs_a_seed(self):
        with pytest.raises(DomainError):
            refine_path(WienerPath.zero(1e-3, 10))

    def test_invalid_arguments(self):
        with pytest.raises(DomainError):
            generate_path(-1, 1e-3, 0.1)
        with pytest.raises(DomainError):
            generate_path(0, 0.0, 0.1)
        with pytest.raises(DomainError):
            WienerPath(seed=0, dt=1e-3, n_steps=3, increments=np.zeros(4))


class TestClosedFormTrajectory:

    def test_noiseless_path_is_bare_damping(self, trajectory_cfg):
        path = WienerPath.zero(1e-3, 50)
        series = trajectory(path, 1j, trajectory_cfg)
        np.testing.assert_allclose(series.amplitude, 1j * np.exp(-0.5 * path.times()), atol=1e-15)

    def test_starts_in_the_initial_state(self, trajectory_cfg):
        series = trajectory(generate_path(0, 1e-3, 0.01), 2 - 1j, trajectory_cfg)
        start = series.state(0)
        assert start.amplitude == 2 - 1j
        assert start.weight == pytest.approx(1.0)
        assert start.functionals == (0j, 0j, 0j)

    def test_weight_forms_agree_without_feedback(self):
        series = trajectory(generate_path(2, 1e-3, 0.05), 1j, FeedbackConfig())
        np.testing.assert_allclose(series.weight_discrepancy(), 0.0, atol=1e-14)

    def test_weight_forms_differ_with_feedback(self, trajectory_cfg):
        ito = trajectory(generate_path(2, 1e-3, 0.05), 1j, trajectory_cfg)
        literal = trajectory(generate_path(2, 1e-3, 0.05), 1j, trajectory_cfg, weight="literal")
        np.testing.assert_array_equal(literal.log_weight, ito.log_weight_literal)
        assert np.max(np.abs(ito.weight_discrepancy())) > 0

    def test_ito_weight_only_halves_the_area_term(self, trajectory_cfg):
        series = trajectory(generate_path(3, 1e-3, 0.5), 1j, trajectory_cfg)
        np.testing.assert_allclose(series.weight_discrepancy(), 0.5j * series.functionals.lam, rtol=0, atol=1e-13)

    def test_noiseless_weight_has_no_drift_term(self, trajectory_cfg):
        path = WienerPath.zero(1e-3, 500)
        series = trajectory(path, 1j, trajectory_cfg, weight="literal")
        ito = trajectory(path, 1j, trajectory_cfg)
        np.testing.assert_array_equal(ito.log_weight, series.log_weight)

    def test_functionals_are_left_point_sums(self, trajectory_cfg):
        path = generate_path(4, 1e-3, 0.005)
        fn = ito_functionals(path, trajectory_cfg)
        f1, _ = f_functions(path.times()[:-1], trajectory_cfg)
        assert fn.chi1[-1] == pytest.approx(np.sum(f1 * path.increments))
        assert fn.lam[1] == 0

    def test_delay_is_rejected(self):
        with pytest.raises(DomainError):
            trajectory(generate_path(0, 1e-3, 0.01), 1j, FeedbackConfig.from_k(1.0, tau=0.1))


class TestCoherence:

    def test_initial_value(self, trajectory_cfg):
        path = generate_path(0, 1e-3, 0.01)
        assert coherence_trajectory(path, 1j, trajectory_cfg)[0] == pytest.approx(initial_coherence(1j))
        assert initial_coherence(5j) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("alpha0", [0.3j, 1j, 0.7 + 0.2j])
    def test_initial_value_for_small_cats(self, alpha0):
        overlap = math.exp(-2.0 * abs(alpha0) ** 2)
        assert initial_coherence(alpha0) == pytest.approx(0.5 * (1.0 + overlap), rel=1e-14)
        assert initial_coherence(alpha0) > 0.5
        path = WienerPath.zero(1e-3, 5)
        full = coherence_trajectory(path, alpha0, FeedbackConfig(g=0.5, theta=0.4))
        assert full[0] == pytest.approx(initial_coherence(alpha0), rel=1e-12)

    def test_asymptotic_modulus_ignores_theta(self):
        path = generate_path(0, 1e-4, 0.01)
        moduli = [
            np.abs(coherence_trajectory(path, 5j, FeedbackConfig(g=1.0, theta=theta), mode="asymptotic"))
            for theta in (0.0, math.pi / 4, math.pi / 2, 1.0)
        ]
        for m in moduli[1:]:
            np.testing.assert_allclose(m, moduli[0], rtol=0, atol=1e-14)

    def test_phase_locks_at_unit_gain(self, trajectory_cfg):
        # g sin(theta) = 1 removes the record-dependent phase
        path = generate_path(1, 1e-4, 0.01)
        c = coherence_trajectory(path, 5j, trajectory_cfg, mode="asymptotic")
        np.testing.assert_allclose(np.angle(c), 0.0, atol=1e-14)

    def test_full_mode_on_noiseless_path(self):
        # g = 0, no noise: both branches decay to +-2i E with unit weight
        path = WienerPath.zero(1e-3, 20)
        c = coherence_trajectory(path, 2j, FeedbackConfig())
        e = math.exp(-0.5 * path.t_max)
        near = math.exp(-2.0 * (1 - e) ** 2)
        far = math.exp(-2.0 * (1 + e) ** 2)
        expected = (near + far) ** 2 / (2.0 * (1.0 + math.exp(-8.0 * e * e)))
        assert c[-1] == pytest.approx(expected, rel=1e-12)
        assert c[0] == pytest.approx(initial_coherence(2j), rel=1e-12)

    def test_asymptotic_domain(self, trajectory_cfg):
        path = generate_path(0, 1e-3, 0.01)
        with pytest.raises(DomainError):
            coherence_trajectory(path, 1 + 5j, trajectory_cfg, mode="asymptotic")
        with pytest.raises(PhaseConventionError):
            coherence_trajectory(path, 5j, trajectory_cfg.with_(phi=0.3), mode="asymptotic")

    def test_unknown_mode(self, trajectory_cfg):
        with pytest.raises(DomainError):
            coherence_trajectory(generate_path(0, 1e-3, 0.01), 5j, trajectory_cfg, mode="median")

    def test_ensemble(self, trajectory_cfg):
        ens = ensemble_coherence([0, 1, 2], 1e-3, 0.01, 5j, trajectory_cfg, threads=1)
        assert ens.samples.shape == (3, 11)
        assert ens.seeds == (0, 1, 2)
        assert ens.mean[0] == pytest.approx(0.5)
        assert ens.modulus_variance[0] == pytest.approx(0.0)

    def test_ensemble_is_order_independent_of_threads(self, trajectory_cfg):
        serial = ensemble_coherence(range(4), 1e-3, 0.01, 5j, trajectory_cfg, threads=1)
        pooled = ensemble_coherence(range(4), 1e-3, 0.01, 5j, trajectory_cfg, threads=4)
        np.testing.assert_array_equal(serial.samples, pooled.samples)

    def test_empty_ensemble(self, trajectory_cfg):
        with pytest.raises(DomainError):
            ensemble_coherence([], 1e-3, 0.01, 5j, trajectory_cfg)

    def test_record_scatters_the_phase_not_the_modulus(self):
        # theta = pi/4: g sin(theta) < 1 leaves a record-dependent phase
        cfg = FeedbackConfig(g=1.0, theta=math.pi / 4)
        ensemble = trajectory_ensemble(cfg, 5j, range(20), gamma_dt=1e-3, gamma_t_max=0.1, threads=1)
        summary = ensemble.summary
        assert summary["final_phase_variance"] > 10 * summary["final_modulus_variance"]
        assert summary["final_phase_variance"] > 0.1


class TestFockOracle:

    def test_coherent_vector_helpers(self):
        vec = coherent_vector(1j, 30)
        assert coherent_fidelity(vec, 1j) == pytest.approx(1.0, abs=1e-12)
        assert fit_coherent_amplitude(vec) == pytest.approx(1j, abs=1e-10)

    def test_agrees_with_closed_form(self, trajectory_cfg):
        report = compare_with_closed_form(generate_path(0, 1e-4, 0.02), 1j, trajectory_cfg, n_max=30)
        assert report.passed()
        assert report.max_fit_residual < 1e-3
        assert report.max_weight_discrepancy > 0

    @pytest.mark.parametrize("theta", [math.pi / 2, math.pi / 4])
    def test_weight_tracks_the_oracle_to_half_a_decay_time(self, theta):
        cfg = FeedbackConfig(g=1.0, theta=theta)
        report = compare_with_closed_form(generate_path(0, 1e-4, 0.5), 1.0, cfg, n_max=30)
        assert report.max_weight_error < 1e-3
        assert 1.0 - report.min_fidelity < 1e-3
        assert report.passed()

    def test_keeps_strided_states(self, trajectory_cfg):
        fock = fock_sde_oracle(generate_path(0, 1e-4, 0.005), 1j, trajectory_cfg, n_max=30, stride=10)
        assert len(fock.t) == 6
        assert fock.norms()[0] == pytest.approx(1.0, abs=1e-9)

    def test_basis_too_small(self, trajectory_cfg):
        with pytest.raises(DomainError):
            fock_sde_oracle(generate_path(0, 1e-4, 0.001), 1j, trajectory_cfg, n_max=5)

    def test_truncation_leak(self, trajectory_cfg):
        with pytest.raises(TruncationLeakError):
            fock_sde_oracle(generate_path(0, 1e-4, 0.001), 0.5, trajectory_cfg, n_max=3)

    def test_unknown_scheme(self, trajectory_cfg):
        with pytest.raises(DomainError):
            fock_sde_oracle(generate_path(0, 1e-4, 0.001), 1j, trajectory_cfg, n_max=30, scheme="heun")

    @pytest.mark.slow
    def test_seed_ensemble(self):
        cfg = FeedbackConfig(g=1.0, theta=math.pi / 2)
        for seed in range(10):
            assert compare_with_closed_form(generate_path(seed, 1e-4, 0.5), 1.0, cfg, n_max=30).passed()


class TestExport:

    def test_csv_layout(self, trajectory_cfg):
        series = trajectory(generate_path(0, 1e-3, 0.01), 1j, trajectory_cfg)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "out", "traj.csv")
            write_trajectory_csv(series, path, header={"seed": 0})
            with open(path, "r", encoding="utf-8") as f:
                lines = f.read().splitlines()
        assert lines[0] == '# {"seed":0}'
        assert lines[1].split(",") == COLUMNS
        assert len(lines) == 2 + len(series.t)

    def test_npz_round_trip(self, trajectory_cfg):
        series = trajectory(generate_path(0, 1e-3, 0.01), 1j, trajectory_cfg)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "traj.npz")
            write_trajectory_npz(series, path, seed=0, dt=1e-3)
            data = load_trajectory_npz(path)
        np.testing.assert_array_equal(data["amp_im"], series.amplitude.imag)
        assert int(data["seed"]) == 0
