"""
Commutator kernels between the cavity quadrature and the input noise.

Every kernel is a function of the time difference d = t - t' and vanishes
for d < 0. The gates Theta(d), Theta(d - tau) and Theta(d - 2 tau) equal one
at zero argument; differences within _GATE_EPS below a gate count as on it.
"""

import cmath
import math
from typing import Union

import numpy as np

from dde.series import ChiEvaluator, get_evaluator
from model.schema import FeedbackConfig

ArrayLike = Union[float, np.ndarray]

_GATE_EPS = 1e-12


def _as_output(values: np.ndarray, scalar: bool):
    return complex(values) if scalar else values


class KernelSet:
    """
    The six kernels F, F_f, R, R1, R_f, R1_f of one parameter set.

    F   = -(sqrt(gamma)/2) e^{-i phi} {chi(d) - k chi(d - tau)}
    F_f = -(sqrt(gamma)/2) e^{-i phi} {sqrt(eta) chi(d) - (k/sqrt(eta)) chi(d - tau)}
    R   = i (sqrt(gamma)/2) g e^{i(theta+phi)}
            {[E(d - tau) - rho(d)] + [chi(d - tau) - E(d - tau)]_{d >= 2 tau}}
    R_f = i sqrt(gamma/(4 eta)) g e^{i(theta+phi)}
            {[E(d - tau) - eta rho(d)] + [chi(d - tau) - E(d - tau)]_{d >= 2 tau}}
    R1  = -2 e^{-i phi} F* - e^{-2 i phi} R   (same with f superscripts)

    with E(d) = exp(-gamma d / 2) and rho = (chi - E) / k the excess ratio.
    """

    def __init__(self, cfg: FeedbackConfig, evaluator: ChiEvaluator = None):
        self.config = cfg
        self.evaluator = evaluator or get_evaluator(cfg)
        self.sqrt_gamma = math.sqrt(cfg.gamma)
        self.e_phi = cmath.exp(-1j * cfg.phi)
        self.e_theta_phi = cmath.exp(1j * (cfg.theta + cfg.phi))

    def _gate(self, d: np.ndarray, shift: float) -> np.ndarray:
        return d - shift >= -_GATE_EPS

    def _chi_gated(self, d: np.ndarray, shift: float) -> np.ndarray:
        mask = self._gate(d, shift)
        out = np.zeros(d.shape)
        if mask.any():
            out[mask] = self.evaluator.values(np.maximum(d[mask] - shift, 0.0))
        return out

    def _prepare(self, dt: ArrayLike):
        d = np.asarray(dt, dtype=float)
        return np.atleast_1d(d), d.ndim == 0

    def _f_combination(self, d: np.ndarray, direct: float, delayed: float) -> np.ndarray:
        tau = self.config.tau
        braces = direct * self._chi_gated(d, 0.0) - delayed * self._chi_gated(d, tau)
        return -0.5 * self.sqrt_gamma * self.e_phi * braces

    def _r_combination(self, d: np.ndarray, prefactor: float, eta: float) -> np.ndarray:
        tau = self.config.tau
        gamma = self.config.gamma
        lagged = np.maximum(d - tau, 0.0)
        first = np.zeros(d.shape)
        second = np.zeros(d.shape)
        on = self._gate(d, tau)
        if on.any():
            first[on] = np.exp(-0.5 * gamma * lagged[on]) - eta * self.evaluator.excess_values(
                np.maximum(d[on], 0.0)
            )
        on = self._gate(d, 2 * tau)
        if on.any():
            second[on] = self.evaluator.values(lagged[on]) - np.exp(-0.5 * gamma * lagged[on])
        return 1j * prefactor * self.config.g * self.e_theta_phi * (first + second)

    def F(self, dt: ArrayLike):
        d, scalar = self._prepare(dt)
        out = self._f_combination(d, 1.0, self.config.k)
        return _as_output(out[0] if scalar else out, scalar)

    def F_f(self, dt: ArrayLike):
        d, scalar = self._prepare(dt)
        s = math.sqrt(self.config.eta)
        out = self._f_combination(d, s, self.config.k / s)
        return _as_output(out[0] if scalar else out, scalar)

    def R(self, dt: ArrayLike):
        d, scalar = self._prepare(dt)
        out = self._r_combination(d, 0.5 * self.sqrt_gamma, 1.0)
        return _as_output(out[0] if scalar else out, scalar)

    def R_f(self, dt: ArrayLike):
        d, scalar = self._prepare(dt)
        eta = self.config.eta
        out = self._r_combination(d, math.sqrt(self.config.gamma / (4.0 * eta)), eta)
        return _as_output(out[0] if scalar else out, scalar)

    def R1(self, dt: ArrayLike):
        d, scalar = self._prepare(dt)
        f = self._f_combination(d, 1.0, self.config.k)
        r = self._r_combination(d, 0.5 * self.sqrt_gamma, 1.0)
        out = -2.0 * self.e_phi * np.conj(f) - self.e_phi ** 2 * r
        return _as_output(out[0] if scalar else out, scalar)

    def R1_f(self, dt: ArrayLike):
        d, scalar = self._prepare(dt)
        eta = self.config.eta
        s = math.sqrt(eta)
        f = self._f_combination(d, s, self.config.k / s)
        r = self._r_combination(d, math.sqrt(self.config.gamma / (4.0 * eta)), eta)
        out = -2.0 * self.e_phi * np.conj(f) - self.e_phi ** 2 * r
        return _as_output(out[0] if scalar else out, scalar)


def kernels(cfg: FeedbackConfig) -> KernelSet:
    return KernelSet(cfg)
