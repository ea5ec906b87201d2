"""
Truncated number-basis integration of the zero-delay trajectory equation

    d|psi> = {A dt + B dw} |psi>
    A = -(gamma/2) a+a - (gamma/2) F^2 - i gamma F a e^{-i phi}
    B = sqrt(gamma) (a e^{-i phi} - i F),   F = g (a e^{-i theta} + a+ e^{i theta}) / 2

The equation is linear and the norm is not restored: |psi| carries the
weight of the measurement record.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from model.errors import DomainError, TruncationLeakError
from model.schema import FeedbackConfig
from trajectories.functionals import require_zero_delay, trajectory
from trajectories.paths import WienerPath
from utils.logger import logger

Scheme = Literal["euler", "milstein"]

LEAK_TOL = 1e-8


def annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def coherent_vector(alpha: complex, n_max: int) -> np.ndarray:
    """Number-basis amplitudes e^{-|a|^2/2} a^n / sqrt(n!), n = 0..n_max."""
    alpha = complex(alpha)
    vec = np.empty(n_max + 1, dtype=complex)
    vec[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        vec[n] = vec[n - 1] * alpha / math.sqrt(n)
    return vec


def generators(cfg: FeedbackConfig, n_max: int):
    """(A, B) as dense matrices on n_max + 1 number states."""
    a = annihilation(n_max)
    ad = a.conj().T
    e_phi = cmath.exp(-1j * cfg.phi)
    f = 0.5 * cfg.g * (a * cmath.exp(-1j * cfg.theta) + ad * cmath.exp(1j * cfg.theta))
    drift = -0.5 * cfg.gamma * (ad @ a) - 0.5 * cfg.gamma * (f @ f) - 1j * cfg.gamma * e_phi * (f @ a)
    noise = math.sqrt(cfg.gamma) * (a * e_phi - 1j * f)
    return drift, noise


@dataclass(frozen=True, eq=False)
class FockSeries:
    t: np.ndarray
    states: np.ndarray

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)


def fock_sde_oracle(
    path: WienerPath,
    alpha0: complex,
    cfg: FeedbackConfig,
    n_max: int,
    scheme: Scheme = "milstein",
    stride: int = 1,
) -> FockSeries:
    """
    Integrate the trajectory equation on the increments of `path`.

    Args:
        path: Wiener increments shared with the closed form.
        alpha0: Initial coherent amplitude.
        cfg: Parameters with tau = 0.
        n_max: Highest number state kept.
        scheme: Euler-Maruyama, or Milstein (adds B^2 (dw^2 - dt) / 2).
        stride: Keep every stride-th state.

    Returns:
        FockSeries with the unnormalized state vectors.

    Raises:
        TruncationLeakError: Population of |n_max> exceeds LEAK_TOL of the norm.
    """
    require_zero_delay(cfg)
    alpha0 = complex(alpha0)
    if not abs(alpha0) ** 2 + 5 * abs(alpha0) < n_max:
        raise DomainError(f"n_max={n_max} is too small for |alpha0|={abs(alpha0):.3g}")
    if scheme not in ("euler", "milstein"):
        raise DomainError(f"unknown scheme: {scheme}")

    drift, noise = generators(cfg, n_max)
    noise2 = noise @ noise
    dt = path.dt
    psi = coherent_vector(alpha0, n_max)

    kept_t = [0.0]
    kept = [psi.copy()]
    for i, dw in enumerate(path.increments):
        b_psi = noise @ psi
        step = drift @ psi * dt + b_psi * dw
        if scheme == "milstein":
            step = step + 0.5 * (noise2 @ psi) * (dw * dw - dt)
        psi = psi + step

        top = abs(psi[-1]) ** 2
        total = float(np.vdot(psi, psi).real)
        if top > LEAK_TOL * total:
            raise TruncationLeakError(
                f"population {top / total:.2e} on |{n_max}> at t={(i + 1) * dt:.4g}; raise n_max"
            )
        if (i + 1) % stride == 0 or i + 1 == path.n_steps:
            kept_t.append((i + 1) * dt)
            kept.append(psi.copy())

    logger.debug(f"fock oracle: {path.n_steps} {scheme} steps, n_max={n_max}, final norm {np.linalg.norm(psi):.6f}")
    return FockSeries(t=np.array(kept_t), states=np.array(kept))


def coherent_fidelity(vec: np.ndarray, amplitude: complex) -> float:
    """|<amplitude|psi>|^2 / <psi|psi>."""
    vec = np.asarray(vec, dtype=complex)
    ref = coherent_vector(amplitude, len(vec) - 1)
    return float(abs(np.vdot(ref, vec)) ** 2 / np.vdot(vec, vec).real)


def fit_coherent_amplitude(vec: np.ndarray) -> complex:
    """<psi|a|psi> / <psi|psi>."""
    vec = np.asarray(vec, dtype=complex)
    a = annihilation(len(vec) - 1)
    return complex(np.vdot(vec, a @ vec) / np.vdot(vec, vec))


@dataclass(frozen=True)
class OracleReport:
    seed: int
    min_fidelity: float
    max_weight_error: float
    max_fit_residual: float
    max_weight_discrepancy: float

    def passed(self, tol: float = 1e-3) -> bool:
        return 1.0 - self.min_fidelity < tol and self.max_weight_error < tol


def compare_with_closed_form(
    path: WienerPath,
    alpha0: complex,
    cfg: FeedbackConfig,
    n_max: int,
    scheme: Scheme = "milstein",
    stride: int = 100,
) -> OracleReport:
    """
    Fidelity of the number-basis states to the closed-form coherent
    amplitudes, relative error of |psi| against |E_w|, and the residual
    1 - fidelity against the fitted amplitude.
    """
    fock = fock_sde_oracle(path, alpha0, cfg, n_max, scheme=scheme, stride=stride)
    closed = trajectory(path, alpha0, cfg)
    idx = np.rint(fock.t / path.dt).astype(int)

    fidelity = np.array([coherent_fidelity(v, closed.amplitude[i]) for v, i in zip(fock.states, idx)])
    fit_residual = np.array([1.0 - coherent_fidelity(v, fit_coherent_amplitude(v)) for v in fock.states])
    weight = np.abs(closed.weight[idx])
    weight_error = np.abs(fock.norms() - weight) / weight
    discrepancy = np.abs(closed.weight_discrepancy()[idx])

    report = OracleReport(
        seed=path.seed,
        min_fidelity=float(fidelity.min()),
        max_weight_error=float(weight_error.max()),
        max_fit_residual=float(fit_residual.max()),
        max_weight_discrepancy=float(discrepancy.max()),
    )
    if report.max_weight_discrepancy > 0:
        logger.info(
            f"seed {path.seed}: literal weight differs from the Ito solution by up to "
            f"{report.max_weight_discrepancy:.3e} in log"
        )
    return report
