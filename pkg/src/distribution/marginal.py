"""
Marginal distribution of the measured quadrature for coherent superpositions.

Gaussian convention: exp{-(x - m)^2 / sigma2} / sqrt(pi sigma2), where sigma2
is twice the usual variance (vacuum value 1/2).
"""

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from dde.series import get_evaluator
from model.errors import RegimeWarning
from model.schema import CoherentSuperposition, FeedbackConfig
from model.states import cat_normalization
from moments.correlation import sigma2
from utils.logger import logger

ArrayLike = Union[float, np.ndarray]

_IMAG_TOL = 1e-10


def _log_overlap(beta: complex, alpha: complex) -> complex:
    return -0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + beta.conjugate() * alpha


def marginal_pdf_complex(xs: ArrayLike, t: float, state: CoherentSuperposition, cfg: FeedbackConfig) -> np.ndarray:
    """Unreduced sum over ordered pairs; its imaginary part cancels for a Hermitian state."""
    xs = np.asarray(xs, dtype=float)
    chi_t = get_evaluator(cfg).chi(t)
    s2 = sigma2(t, cfg)
    phase = cmath.exp(1j * cfg.phi)
    norm = 1.0 / math.sqrt(math.pi * s2)

    total = np.zeros(xs.shape, dtype=complex)
    for alpha, beta, weight in state.pairs():
        if weight == 0:
            continue
        m0 = (alpha * phase.conjugate() + beta.conjugate() * phase) / 2
        # Overlap and Gaussian combined in the exponent; both factors alone can overflow.
        exponent = _log_overlap(beta, alpha) - (xs - m0 * chi_t) ** 2 / s2
        total += weight * np.exp(exponent)
    return norm * total


def marginal_pdf_grid(xs: ArrayLike, t: float, state: CoherentSuperposition, cfg: FeedbackConfig) -> np.ndarray:
    """P(x, t) on an array of quadrature values."""
    values = marginal_pdf_complex(xs, t, state, cfg)
    scale = max(1.0, float(np.max(np.abs(values.real)))) if values.size else 1.0
    leak = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if leak > _IMAG_TOL * scale:
        logger.warning(f"marginal_pdf: imaginary residue {leak:.3e} (state not Hermitian?)")
    return values.real


def marginal_pdf(x: float, t: float, state: CoherentSuperposition, cfg: FeedbackConfig) -> float:
    """P(x, t) = sum_ab N_ab <b|a> / sqrt(pi sigma2) exp{-[x - m_ab chi(t)]^2 / sigma2}."""
    return float(marginal_pdf_grid(np.array([x]), t, state, cfg)[0])


@dataclass(frozen=True)
class CatFringeReport:
    """Components of the even-cat distribution at one time.

    ``visibility_exponent`` is the power of <a0|-a0> that multiplies the
    fringe term; ``overlap_factor`` is that power evaluated.
    """

    t: float
    alpha0: complex
    normalization: float
    mean_shift: float
    sigma2: float
    omega_slope: float
    visibility_exponent: float
    overlap_factor: float

    def p_plus(self, x: ArrayLike) -> np.ndarray:
        """sqrt of the Gaussian centered at +Re(a0 e^{-i phi}) chi(t)."""
        return np.sqrt(self._gaussian(np.asarray(x, dtype=float) - self.mean_shift))

    def p_minus(self, x: ArrayLike) -> np.ndarray:
        return np.sqrt(self._gaussian(np.asarray(x, dtype=float) + self.mean_shift))

    def _gaussian(self, d: np.ndarray) -> np.ndarray:
        return np.exp(-(d ** 2) / self.sigma2) / math.sqrt(math.pi * self.sigma2)

    def omega(self, x: ArrayLike) -> np.ndarray:
        return self.omega_slope * np.asarray(x, dtype=float)

    def envelope(self, x: ArrayLike) -> np.ndarray:
        """N^2 (p+^2 + p-^2), the distribution without the fringe term."""
        return self.normalization ** 2 * (self.p_plus(x) ** 2 + self.p_minus(x) ** 2)

    def pdf(self, x: ArrayLike) -> np.ndarray:
        pp = self.p_plus(x)
        pm = self.p_minus(x)
        fringe = 2.0 * pp * pm * np.cos(self.omega(x)) * self.overlap_factor
        return self.normalization ** 2 * (pp ** 2 + pm ** 2 + fringe)


def visibility_exponent(t: float, cfg: FeedbackConfig) -> float:
    """1 - chi(t)^2 / (2 sigma2(t))."""
    chi_t = get_evaluator(cfg).chi(t)
    return 1.0 - chi_t ** 2 / (2.0 * sigma2(t, cfg))


def cat_fringe_report(t: float, alpha0: complex, cfg: FeedbackConfig) -> CatFringeReport:
    alpha0 = complex(alpha0)
    chi_t = get_evaluator(cfg).chi(t)
    s2 = sigma2(t, cfg)
    rotated = alpha0 * cmath.exp(-1j * cfg.phi)
    exponent = 1.0 - chi_t ** 2 / (2.0 * s2)
    # <a0|-a0> = exp(-2|a0|^2)
    return CatFringeReport(
        t=float(t),
        alpha0=alpha0,
        normalization=cat_normalization(alpha0),
        mean_shift=rotated.real * chi_t,
        sigma2=s2,
        omega_slope=2.0 * rotated.imag * chi_t / s2,
        visibility_exponent=exponent,
        overlap_factor=math.exp(-2.0 * abs(alpha0) ** 2 * exponent),
    )


def cat_pdf(x: ArrayLike, t: float, alpha0: complex, cfg: FeedbackConfig):
    """N^2 {p+^2 + p-^2 + 2 p+ p- cos(Omega) <a0|-a0>^eta(t)} for the even cat."""
    values = cat_fringe_report(t, alpha0, cfg).pdf(x)
    return float(values) if np.ndim(values) == 0 else values


def fringe_contrast(
    t: float,
    alpha0: complex,
    cfg: FeedbackConfig,
    half_width: float = 1.0,
    n_points: int = 2001,
) -> float:
    """
    (max - min) / (max + min) of P / envelope over |x| <= half_width.

    Dividing by the envelope N^2 (p+^2 + p-^2) leaves 1 + V(x) cos(Omega x),
    so the metric reads the fringe depth rather than the Gaussian falloff.
    Artifact-level diagnostic, not a quantity of the model itself.
    """
    report = cat_fringe_report(t, alpha0, cfg)
    xs = np.linspace(-half_width, half_width, n_points)
    ratio = report.pdf(xs) / report.envelope(xs)
    hi = float(np.max(ratio))
    lo = float(np.min(ratio))
    return (hi - lo) / (hi + lo)


def decoherence_time(cfg: FeedbackConfig, alpha0: complex) -> float:
    """t_dec = 1 / (2 gamma |a0|^2 (1 - k)^2); +inf at k = 1.

    Derived for tau = 0 and eta = 1; other regimes get a RegimeWarning.
    """
    if cfg.tau > 0 or cfg.eta < 1:
        message = (
            f"decoherence_time assumes tau = 0 and eta = 1 (got tau={cfg.tau}, eta={cfg.eta})"
        )
        logger.warning(message)
        warnings.warn(message, RegimeWarning, stacklevel=2)
    denominator = 2.0 * cfg.gamma * abs(complex(alpha0)) ** 2 * (1.0 - cfg.k) ** 2
    if denominator == 0:
        return math.inf
    return 1.0 / denominator
