"""Tests for model: parameter records, initial states and JSON persistence."""

import json
import math
import os
import tempfile

import pytest
from pydantic import ValidationError

from model.errors import (
    ConfigError,
    InvalidDampingError,
    InvalidDelayError,
    InvalidEfficiencyError,
    InvalidStateError,
)
from model.schema import CoherentSuperposition, FeedbackConfig, TimeGrid, delay_knots, overlap
from model.serialization import load_config, load_state, save_config, save_state
from model.states import cat_normalization, cat_state, coherent, vacuum


class TestFeedbackConfig:

    def test_defaults_are_the_bare_cavity(self):
        cfg = FeedbackConfig()
        assert cfg.gamma == 1.0
        assert cfg.g == 0.0
        assert cfg.k == 0.0
        assert cfg.eta == 1.0

    def test_effective_gain(self):
        cfg = FeedbackConfig(g=0.8, theta=1.1, phi=0.3)
        assert cfg.k == pytest.approx(0.8 * math.sin(0.8))

    @pytest.mark.parametrize("k", [-0.45, 0.0, 0.45, 1.0])
    def test_from_k_unit_gain(self, k):
        cfg = FeedbackConfig.from_k(k, tau=0.5)
        assert cfg.g == 1.0
        assert cfg.k == pytest.approx(k, abs=1e-15)
        assert cfg.tau == 0.5

    def test_from_k_above_one_scales_gain(self):
        cfg = FeedbackConfig.from_k(2.0)
        assert cfg.g == 2.0
        assert cfg.theta == pytest.approx(math.pi / 2)
        assert cfg.k == pytest.approx(2.0)

    def test_invalid_damping(self):
        with pytest.raises(InvalidDampingError):
            FeedbackConfig(gamma=0.0)

    def test_invalid_delay(self):
        with pytest.raises(InvalidDelayError):
            FeedbackConfig(tau=-0.1)

    @pytest.mark.parametrize("eta", [0.0, -0.5, 1.01])
    def test_invalid_efficiency(self, eta):
        with pytest.raises(InvalidEfficiencyError):
            FeedbackConfig(eta=eta)

    def test_config_errors_share_a_base(self):
        with pytest.raises(ConfigError):
            FeedbackConfig(gamma=-1.0)

    def test_frozen(self):
        cfg = FeedbackConfig()
        with pytest.raises(ValidationError):
            cfg.g = 2.0

    def test_with_revalidates(self):
        cfg = FeedbackConfig.from_k(1.0)
        assert cfg.with_(tau=0.2).tau == 0.2
        with pytest.raises(InvalidDelayError):
            cfg.with_(tau=-1.0)

    def test_hashable_and_equal(self):
        a = FeedbackConfig.from_k(0.45, tau=1.0)
        b = FeedbackConfig.from_k(0.45, tau=1.0)
        assert a == b
        assert len({a, b}) == 1


class TestStates:

    def test_cat_normalization_large_amplitude(self):
        assert cat_normalization(5j) == pytest.approx(1 / math.sqrt(2), rel=1e-15)

    @pytest.mark.parametrize("alpha0", [0.3, 1.0, 2j, 1 + 1j, 5j])
    def test_cat_is_normalized(self, alpha0):
        assert cat_state(alpha0).norm() == pytest.approx(1.0, abs=1e-12)

    def test_cat_terms(self):
        state = cat_state(2j)
        assert state.amplitudes == [2j, -2j]
        assert state.coefficients[0] == state.coefficients[1]

    def test_coherent_and_vacuum(self):
        assert coherent(1 + 2j).norm() == pytest.approx(1.0)
        assert vacuum().amplitudes == [0j]

    def test_overlap_modulus(self):
        assert abs(overlap(1.0, -1.0)) == pytest.approx(math.exp(-2.0))

    def test_pairs_cover_density_matrix(self):
        state = cat_state(1j)
        weights = state.density_weights()
        pairs = list(state.pairs())
        assert len(pairs) == 4
        assert pairs[1][2] == pytest.approx(weights[0, 1])

    def test_density_weights_read_only(self):
        weights = cat_state(1.0).density_weights()
        with pytest.raises(ValueError):
            weights[0, 0] = 2.0

    def test_empty_superposition(self):
        with pytest.raises(InvalidStateError):
            CoherentSuperposition(terms=[])

    def test_zero_norm_superposition(self):
        with pytest.raises(InvalidStateError):
            CoherentSuperposition.from_pairs([(1.0, 1.0), (1.0, -1.0)], norm_mode="renormalize")

    def test_renormalize(self):
        state = CoherentSuperposition.from_pairs([(1.0, 3.0), (-1.0, 3.0)], norm_mode="renormalize")
        assert state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_as_given_keeps_coefficients(self):
        state = CoherentSuperposition.from_pairs([(1.0, 3.0)])
        assert state.coefficients == [3.0]
        assert state.norm() == pytest.approx(9.0)


class TestTimeGrid:

    def test_knots_at_multiples_of_tau(self):
        grid = TimeGrid.uniform(1.0, n_points=11, tau=0.3)
        assert grid.knots == pytest.approx([0.3, 0.6, 0.9])
        assert len(grid.segments()) == 4

    def test_no_knots_without_delay(self):
        assert delay_knots(0.0, 1.0, 0.0) == []
        assert TimeGrid.uniform(1.0).segments() == [(0.0, 1.0)]

    def test_points_with_knots(self):
        grid = TimeGrid.uniform(1.0, n_points=3, tau=0.3)
        pts = grid.points(include_knots=True)
        assert 0.3 in pts
        assert pts[0] == 0.0 and pts[-1] == 1.0

    def test_rejects_reversed_interval(self):
        with pytest.raises(ValidationError):
            TimeGrid(t_start=1.0, t_end=0.5)


class TestSerialization:

    def test_config_round_trip(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "cfg.json")
            cfg = FeedbackConfig(g=0.7, theta=0.3, phi=0.2, tau=0.2, eta=0.8)
            save_config(cfg, path)
            loaded = load_config(path)
            assert loaded == cfg
            assert loaded.k == cfg.k

    def test_state_round_trip_uses_pairs(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "state.json")
            save_state(cat_state(1 + 2j), path)
            with open(path, "r", encoding="utf-8") as f:
                raw = json.load(f)
            assert raw["terms"][0]["amplitude"] == [1.0, 2.0]
            assert load_state(path) == cat_state(1 + 2j)

    def test_missing_file_returns_none(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            assert load_config(os.path.join(tmpdir, "nope.json")) is None

    def test_invalid_file_returns_none(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "bad.json")
            with open(path, "w", encoding="utf-8") as f:
                f.write("{not json")
            assert load_config(path) is None
