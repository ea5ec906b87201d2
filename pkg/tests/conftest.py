"""Shared test configuration and fixtures for delayfb tests."""

import sys
import os
import math

# Add src/ to sys.path so that model, dde, charfn, ... are importable
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import pytest

from charfn.exact import reset_solvers
from dde.series import reset_evaluators
from model.schema import FeedbackConfig


@pytest.fixture
def clean_registries():
    """Drop cached chi evaluators and charfn solvers before and after a test."""
    reset_evaluators()
    reset_solvers()
    yield
    reset_evaluators()
    reset_solvers()


@pytest.fixture
def markov_cfg():
    """tau = 0, k = 1, eta = 1."""
    return FeedbackConfig.from_k(1.0)


@pytest.fixture
def delayed_cfg():
    """gamma tau = 0.01, k = 1, eta = 1 (the retarded-decoherence panel)."""
    return FeedbackConfig.from_k(1.0, tau=0.01)


@pytest.fixture
def trajectory_cfg():
    """g = 1, theta = pi/2, phi = 0, tau = 0."""
    return FeedbackConfig(g=1.0, theta=math.pi / 2)
