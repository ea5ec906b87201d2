"""
Zero-delay quantum trajectories in closed form.

For tau = 0 the linear stochastic equation d|psi> = (A dt + B dw)|psi>
keeps a coherent initial state coherent:

    |psi_w(t)> = E_w(t) |(chi_+(t) + a0) e^{-gamma t/2}>

with chi_j = int f_j dw, Lam = int (f1 chi2 - f2 chi1) dw and
chi_+- = (chi1 +- i chi2) / sqrt(2). All stochastic integrals are Ito
(left-point) sums over the increments of a WienerPath.

Two forms of log E_w are kept:

* ``literal``: the textbook expression
      i Lam + (chi_+* + chi_-)(chi_+ + 2 a0)/2 + i Im(chi_+ a0*)
      + i (g/4) gamma t e^{i(theta-phi)}
      - [|b|^2 + b^2 e^{-2i phi}](1 - e^{-gamma t}) / 2,   b = chi_+ + a0
* ``ito`` (default): the expression that solves the Ito equation,
      literal - (i/2) Lam
  i.e. the Levy-area term carries a factor 1/2. Lam vanishes for g = 0,
  where both forms agree.

The difference is reported by ``TrajectorySeries.weight_discrepancy`` and
never folded into the literal form.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, List, Literal, Optional, Tuple

import numpy as np

from model.errors import DomainError, PhaseConventionError
from model.schema import FeedbackConfig
from model.states import cat_normalization
from trajectories.paths import WienerPath, generate_path
from utils.logger import logger
from utils.parallel import map_ordered

WeightForm = Literal["ito", "literal"]
CoherenceMode = Literal["full", "asymptotic"]

_PHASE_TOL = 1e-12


def require_zero_delay(cfg: FeedbackConfig) -> None:
    if cfg.tau != 0:
        raise DomainError(f"trajectories are only available for tau = 0, got tau={cfg.tau}")


def f_functions(t, cfg: FeedbackConfig):
    """(f1(t), f2(t)); scalars for scalar t, arrays otherwise."""
    require_zero_delay(cfg)
    ts = np.asarray(t, dtype=float)
    g, theta, phi = cfg.g, cfg.theta, cfg.phi
    scale = math.sqrt(cfg.gamma) / 2 ** 1.5
    grow = np.exp(0.5 * cfg.gamma * ts)
    decay = np.exp(-0.5 * cfg.gamma * ts)
    e2 = cmath.exp(-2j * phi)
    bracket = -1j * g * cmath.exp(-1j * theta) + 2.0 * cmath.exp(-1j * phi) + 1j * g * cmath.exp(1j * (theta - 2 * phi))

    f1 = scale * (-1j * g * (1 + e2) * cmath.exp(1j * theta) * grow + bracket * decay)
    f2 = scale * (-g * (1 - e2) * cmath.exp(1j * theta) * grow + 1j * bracket * decay)
    if ts.ndim == 0:
        return complex(f1), complex(f2)
    return f1, f2


@dataclass(frozen=True, eq=False)
class ItoFunctionals:
    t: np.ndarray
    chi1: np.ndarray
    chi2: np.ndarray
    lam: np.ndarray

    @property
    def chi_plus(self) -> np.ndarray:
        return (self.chi1 + 1j * self.chi2) / math.sqrt(2.0)

    @property
    def chi_minus(self) -> np.ndarray:
        return (self.chi1 - 1j * self.chi2) / math.sqrt(2.0)


def ito_functionals(path: WienerPath, cfg: FeedbackConfig) -> ItoFunctionals:
    """chi1, chi2 and Lam on every node of the path (left-point sums)."""
    ts = path.times()
    f1, f2 = f_functions(ts[:-1], cfg)
    dw = path.increments

    chi1 = np.concatenate(([0j], np.cumsum(f1 * dw)))
    chi2 = np.concatenate(([0j], np.cumsum(f2 * dw)))
    area = (f1 * chi2[:-1] - f2 * chi1[:-1]) * dw
    lam = np.concatenate(([0j], np.cumsum(area)))
    return ItoFunctionals(t=ts, chi1=chi1, chi2=chi2, lam=lam)


@dataclass(frozen=True)
class TrajectoryState:
    t: float
    amplitude: complex
    weight: complex
    functionals: Tuple[complex, complex, complex]


@dataclass(frozen=True, eq=False)
class TrajectorySeries:
    """Coherent amplitude and weight of one trajectory on every path node."""

    alpha0: complex
    functionals: ItoFunctionals
    amplitude: np.ndarray
    log_weight: np.ndarray
    log_weight_literal: np.ndarray
    w: np.ndarray

    @property
    def t(self) -> np.ndarray:
        return self.functionals.t

    @property
    def weight(self) -> np.ndarray:
        return np.exp(self.log_weight)

    def weight_discrepancy(self) -> np.ndarray:
        """log E_w(literal) - log E_w(ito)."""
        return self.log_weight_literal - self.log_weight

    def state(self, index: int) -> TrajectoryState:
        fn = self.functionals
        return TrajectoryState(
            t=float(fn.t[index]),
            amplitude=complex(self.amplitude[index]),
            weight=complex(np.exp(self.log_weight[index])),
            functionals=(complex(fn.chi1[index]), complex(fn.chi2[index]), complex(fn.lam[index])),
        )

    def states(self) -> List[TrajectoryState]:
        return [self.state(i) for i in range(len(self.t))]


def _log_weights(fn: ItoFunctionals, alpha0: complex, cfg: FeedbackConfig) -> Tuple[np.ndarray, np.ndarray]:
    gamma, g = cfg.gamma, cfg.g
    gt = gamma * fn.t
    cp, cm = fn.chi_plus, fn.chi_minus
    b = cp + alpha0
    e2phi = cmath.exp(-2j * cfg.phi)
    literal = (
        1j * fn.lam
        + 0.5 * (np.conj(cp) + cm) * (cp + 2 * alpha0)
        + 1j * np.imag(cp * np.conj(alpha0))
        + 0.25j * g * gt * cmath.exp(1j * (cfg.theta - cfg.phi))
        - 0.5 * (np.abs(b) ** 2 + b ** 2 * e2phi) * (-np.expm1(-gt))
    )
    correction = -0.5j * fn.lam
    return literal + correction, literal


def trajectory(
    path: WienerPath,
    alpha0: complex,
    cfg: FeedbackConfig,
    weight: WeightForm = "ito",
) -> TrajectorySeries:
    """
    Amplitude (chi_+ + a0) e^{-gamma t/2} and weight E_w of the trajectory
    started in the normalized coherent state |a0>.

    Args:
        path: Wiener increments.
        alpha0: Initial coherent amplitude.
        cfg: Parameters with tau = 0.
        weight: Which log E_w goes into ``log_weight``; the literal form is
            always kept in ``log_weight_literal``.
    """
    require_zero_delay(cfg)
    alpha0 = complex(alpha0)
    fn = ito_functionals(path, cfg)
    amplitude = (fn.chi_plus + alpha0) * np.exp(-0.5 * cfg.gamma * fn.t)
    ito, literal = _log_weights(fn, alpha0, cfg)
    chosen = ito if weight == "ito" else literal
    return TrajectorySeries(
        alpha0=alpha0,
        functionals=fn,
        amplitude=amplitude,
        log_weight=chosen,
        log_weight_literal=literal,
        w=path.cumulative,
    )


def log_overlap_array(beta, alpha):
    """log <beta|alpha> for arrays."""
    beta = np.asarray(beta, dtype=complex)
    alpha = np.asarray(alpha, dtype=complex)
    return -0.5 * np.abs(alpha) ** 2 - 0.5 * np.abs(beta) ** 2 + np.conj(beta) * alpha


def _coherence_full(path: WienerPath, alpha0: complex, cfg: FeedbackConfig) -> np.ndarray:
    plus = trajectory(path, alpha0, cfg)
    minus = trajectory(path, -alpha0, cfg)
    a_p, a_m = plus.amplitude, minus.amplitude
    # Common real shift; the cat normalization cancels in the ratio.
    shift = np.maximum(plus.log_weight.real, minus.log_weight.real)
    e_p = np.exp(plus.log_weight - shift)
    e_m = np.exp(minus.log_weight - shift)

    def ov(beta, alpha):
        return np.exp(log_overlap_array(beta, alpha))

    left = e_p * ov(-alpha0, a_p) + e_m * ov(-alpha0, a_m)
    right = np.conj(e_p) * ov(a_p, alpha0) + np.conj(e_m) * ov(a_m, alpha0)
    norm = np.abs(e_p) ** 2 + np.abs(e_m) ** 2 + 2.0 * np.real(np.conj(e_p) * e_m * ov(a_p, a_m))
    return left * right / norm


def _coherence_asymptotic(path: WienerPath, alpha0: complex, cfg: FeedbackConfig) -> np.ndarray:
    if abs(cfg.phi) > _PHASE_TOL:
        raise PhaseConventionError(f"asymptotic coherence is written for phi = 0, got phi={cfg.phi}")
    if abs(alpha0.real) > _PHASE_TOL * max(1.0, abs(alpha0)):
        raise DomainError(f"asymptotic coherence assumes Re(alpha0) = 0, got alpha0={alpha0}")
    w = path.cumulative
    modulus = 0.5 * np.exp(-0.25 * cfg.gamma * cfg.g ** 2 * w ** 2)
    phase = -2.0 * math.sqrt(cfg.gamma) * abs(alpha0) * (1.0 - cfg.g * math.sin(cfg.theta)) * w
    return modulus * np.exp(1j * phase)


def coherence_trajectory(
    path: WienerPath,
    alpha0: complex,
    cfg: FeedbackConfig,
    mode: CoherenceMode = "full",
) -> np.ndarray:
    """
    C_w(t) = <-a0|psi_w(t)> <psi_w(t)|a0> / <psi_w(t)|psi_w(t)> for the even cat.

    ``full`` evaluates the ratio from both coherent branches; ``asymptotic``
    is the |a0| >> 1, gamma t << 1 form
    (1/2) exp{-(gamma g^2/4) w^2 - 2i sqrt(gamma) |a0| (1 - g sin(theta)) w}.
    """
    require_zero_delay(cfg)
    alpha0 = complex(alpha0)
    if mode == "asymptotic":
        return _coherence_asymptotic(path, alpha0, cfg)
    if mode != "full":
        raise DomainError(f"unknown coherence mode: {mode}")
    return _coherence_full(path, alpha0, cfg)


@dataclass(frozen=True, eq=False)
class EnsembleCoherence:
    t: np.ndarray
    seeds: Tuple[int, ...]
    samples: np.ndarray

    @property
    def mean(self) -> np.ndarray:
        return self.samples.mean(axis=0)

    @property
    def modulus_variance(self) -> np.ndarray:
        return np.abs(self.samples).var(axis=0)

    @property
    def phase_variance(self) -> np.ndarray:
        return np.angle(self.samples).var(axis=0)


def ensemble_coherence(
    seeds: Iterable[int],
    dt: float,
    t_max: float,
    alpha0: complex,
    cfg: FeedbackConfig,
    mode: CoherenceMode = "asymptotic",
    threads: Optional[int] = None,
    progress: bool = False,
) -> EnsembleCoherence:
    """C_w(t) over a seed ensemble; seeds run independently on the worker pool."""
    require_zero_delay(cfg)
    seeds = tuple(int(s) for s in seeds)
    if not seeds:
        raise DomainError("ensemble_coherence needs at least one seed")

    def run(seed: int) -> np.ndarray:
        return coherence_trajectory(generate_path(seed, dt, t_max), alpha0, cfg, mode)

    samples = np.array(map_ordered(run, seeds, desc="Seeds", threads=threads, progress=progress))
    logger.debug(f"ensemble of {len(seeds)} paths, {samples.shape[1]} nodes, mode={mode}")
    t = dt * np.arange(samples.shape[1])
    return EnsembleCoherence(t=t, seeds=seeds, samples=samples)


def initial_coherence(alpha0: complex) -> float:
    """
    C_w(0) for the even cat N(|a0> + |-a0>) with N from ``cat_normalization``.

    Both brackets of <-a0|psi><psi|a0> equal N (1 + <-a0|a0>), so
    C_w(0) = N^2 (1 + <-a0|a0>)^2 = (1 + <-a0|a0>) / 2, exact for every a0.
    It tends to 1/2 only once |a0| is large.
    """
    overlap = math.exp(-2.0 * abs(complex(alpha0)) ** 2)
    return cat_normalization(alpha0) ** 2 * (1.0 + overlap) ** 2
