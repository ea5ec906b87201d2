"""
Closed forms of the characteristic function <D(lambda, t)>_{beta alpha}.

* early segment 0 <= t <= 2 tau: exact Gaussian form (the delayed field has
  not yet been fed back when it re-enters the loop);
* small-delay form for t >= 2 tau, first order in gamma*tau, phases chosen
  so that phi = 0;
* the cat coherence function 2 <D(2 a0, t)> built on both.
"""

import cmath
import math

from scipy.special import exprel

from dde.series import get_evaluator
from model.errors import DomainError, PhaseConventionError
from model.schema import FeedbackConfig

_PHASE_TOL = 1e-12
_EDGE_TOL = 1e-12


def log_overlap(beta: complex, alpha: complex) -> complex:
    """log <beta|alpha>."""
    return -0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + beta.conjugate() * alpha


def log_displacement_matrix_element(lam: complex, alpha: complex, beta: complex) -> complex:
    lam, alpha, beta = complex(lam), complex(alpha), complex(beta)
    return log_overlap(beta, alpha) - 0.5 * abs(lam) ** 2 + lam * beta.conjugate() - lam.conjugate() * alpha


def displacement_matrix_element(lam: complex, alpha: complex, beta: complex) -> complex:
    """<beta| D(lambda) |alpha> = <beta|alpha> exp(-|lambda|^2/2 + lambda beta* - lambda* alpha)."""
    return cmath.exp(log_displacement_matrix_element(lam, alpha, beta))


def quadrature_weight(lam: complex, theta: float) -> float:
    """L = lambda e^{-i theta} + lambda* e^{i theta} (always real)."""
    return 2.0 * (complex(lam) * cmath.exp(-1j * theta)).real


def _require_zero_phase(cfg: FeedbackConfig, what: str) -> None:
    if abs(cfg.phi) > _PHASE_TOL:
        raise PhaseConventionError(f"{what} is written for phi = 0, got phi={cfg.phi}")


# ----------------------------------------------------------------------
# Early segment
# ----------------------------------------------------------------------


def log_charfn_early(lam: complex, t: float, alpha: complex, beta: complex, cfg: FeedbackConfig) -> complex:
    """
    log <D(lambda, t)> for 0 <= t <= 2 tau.

    <D> = <beta|alpha> exp(-|mu|^2/2 + mu beta* - mu* alpha - nu/2) with
    mu = lambda E(t) + (i/2) e^{i phi} L g rho(t) Theta(t - tau) and, for
    X = gamma (t - tau) >= 0,

    nu = |lambda|^2 (1 - e^{-gamma t})
         + (g L)^2/4 (1 - e^{-X} (1 + X^2))
         + (1 - eta)/(4 eta) (g L)^2 (1 - e^{-X})
         - g L Im(lambda e^{-i phi}) e^{-gamma tau/2} X e^{-X}.
    """
    t = float(t)
    if t < 0 or t > 2.0 * cfg.tau * (1 + _EDGE_TOL) + _EDGE_TOL:
        raise DomainError(f"early closed form holds for 0 <= t <= 2 tau (tau={cfg.tau}), got t={t}")
    lam, alpha, beta = complex(lam), complex(alpha), complex(beta)
    ev = get_evaluator(cfg)
    gamma, g, eta = cfg.gamma, cfg.g, cfg.eta

    mu = lam * ev.damping(t)
    nu = abs(lam) ** 2 * (1.0 - math.exp(-gamma * t))
    if t >= cfg.tau:
        gl = g * quadrature_weight(lam, cfg.theta)
        x = gamma * (t - cfg.tau)
        ex = math.exp(-x)
        mu += 0.5j * cmath.exp(1j * cfg.phi) * gl * ev.excess_ratio(t)
        nu += 0.25 * gl ** 2 * (1.0 - ex * (1.0 + x * x))
        nu += (1.0 - eta) / (4.0 * eta) * gl ** 2 * (1.0 - ex)
        nu -= gl * (lam * cmath.exp(-1j * cfg.phi)).imag * math.exp(-0.5 * gamma * cfg.tau) * x * ex

    return (
        log_overlap(beta, alpha)
        - 0.5 * abs(mu) ** 2
        + mu * beta.conjugate()
        - mu.conjugate() * alpha
        - 0.5 * nu
    )


def charfn_early(lam: complex, t: float, alpha: complex, beta: complex, cfg: FeedbackConfig) -> complex:
    return cmath.exp(log_charfn_early(lam, t, alpha, beta, cfg))


# ----------------------------------------------------------------------
# Small-delay form
# ----------------------------------------------------------------------


class SmallTauCoefficients:
    """
    Coefficients of <D> = <beta|alpha> exp{-A|l|^2 + B1 l^2 + B2 l*^2 + C l + D l*}.

    Written with k = g sin(theta) (phi = 0). The 1/sin(theta) ratios of the
    textbook form are replaced by the excess ratio rho0 = (chi0 - E) / k, so
    the coefficients stay finite at sin(theta) = 0.
    """

    def __init__(self, cfg: FeedbackConfig, alpha: complex = 0j, beta: complex = 0j):
        _require_zero_phase(cfg, "the small-delay characteristic function")
        self.config = cfg
        self.alpha = complex(alpha)
        self.beta = complex(beta)
        self.k = cfg.k

    def _markov_exponent(self, t: float) -> float:
        return (1.0 - 2.0 * self.k) * self.config.gamma * t

    def F0(self, t: float) -> float:
        """(1 - e^{-(1-2k) gamma t}) / (1 - 2k)."""
        gt = self.config.gamma * t
        x = self._markov_exponent(t)
        return gt * math.exp(-x) * float(exprel(x))

    def F1(self, t: float) -> float:
        gt = self.config.gamma * t
        return (1.0 + gt * self.k) * math.exp(-self._markov_exponent(t)) + self.k * self.F0(t)

    def _spread(self, t: float) -> float:
        return self.F0(t) - self.config.gamma * self.config.tau * self.F1(t)

    def A(self, t: float) -> float:
        return 0.5 + self.config.g ** 2 / (4.0 * self.config.eta) * self._spread(t)

    def B1(self, t: float) -> complex:
        return -self.config.g ** 2 / (8.0 * self.config.eta) * self._spread(t) * cmath.exp(-2j * self.config.theta)

    def B2(self, t: float) -> complex:
        return self.B1(t).conjugate()

    def _shift(self, t: float) -> complex:
        """Common (i/2) g (alpha + beta*) {rho0 + ((1-2k) gamma t/2 - 1) chi0 gamma tau} factor."""
        cfg = self.config
        gt = cfg.gamma * t
        damping = math.exp(-0.5 * gt)
        chi0 = math.exp(-0.5 * self._markov_exponent(t))
        rho0 = damping * gt * float(exprel(self.k * gt))
        correction = (0.5 * self._markov_exponent(t) - 1.0) * chi0 * cfg.gamma * cfg.tau
        return 0.5j * cfg.g * (self.alpha + self.beta.conjugate()) * (rho0 + correction)

    def C(self, t: float) -> complex:
        damping = math.exp(-0.5 * self.config.gamma * t)
        return self.beta.conjugate() * damping + cmath.exp(-1j * self.config.theta) * self._shift(t)

    def D(self, t: float) -> complex:
        damping = math.exp(-0.5 * self.config.gamma * t)
        return -self.alpha * damping + cmath.exp(1j * self.config.theta) * self._shift(t)

    def exponent(self, lam: complex, t: float) -> complex:
        lam = complex(lam)
        lc = lam.conjugate()
        return (
            -self.A(t) * abs(lam) ** 2
            + self.B1(t) * lam * lam
            + self.B2(t) * lc * lc
            + self.C(t) * lam
            + self.D(t) * lc
        )


def log_charfn_small_tau(lam: complex, t: float, alpha: complex, beta: complex, cfg: FeedbackConfig) -> complex:
    t = float(t)
    if t < 2.0 * cfg.tau * (1 - _EDGE_TOL):
        raise DomainError(f"small-delay form holds for t >= 2 tau (tau={cfg.tau}), got t={t}")
    coeffs = SmallTauCoefficients(cfg, alpha, beta)
    return log_overlap(complex(beta), complex(alpha)) + coeffs.exponent(lam, t)


def charfn_small_tau(lam: complex, t: float, alpha: complex, beta: complex, cfg: FeedbackConfig) -> complex:
    """First-order-in-gamma*tau characteristic function (t >= 2 tau, phi = 0)."""
    return cmath.exp(log_charfn_small_tau(lam, t, alpha, beta, cfg))


# ----------------------------------------------------------------------
# Coherence function
# ----------------------------------------------------------------------


def log_coherence_function(t: float, alpha0: complex, cfg: FeedbackConfig) -> float:
    _require_zero_phase(cfg, "the coherence function")
    alpha0 = complex(alpha0)
    if abs(alpha0.real) > _PHASE_TOL * max(1.0, abs(alpha0)):
        raise DomainError(f"the coherence function assumes Re(alpha0) = 0, got alpha0={alpha0}")
    t = float(t)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")

    if t < 2.0 * cfg.tau:
        # The dominant off-diagonal pair (alpha = -a0, beta = a0) with N^2 -> 1/2.
        value = log_charfn_early(2.0 * alpha0, t, -alpha0, alpha0, cfg)
        return math.log(0.5) + value.real

    coeffs = SmallTauCoefficients(cfg)
    k = cfg.k
    gt = cfg.gamma * t
    gtau = cfg.gamma * cfg.tau
    chi0 = math.exp(-0.5 * (1.0 - 2.0 * k) * gt)
    bracket = (
        2.0
        + k * k / cfg.eta * (coeffs.F0(t) - gtau * coeffs.F1(t))
        - 2.0 * chi0
        + k * (2.0 - gt * (1.0 - 2.0 * k)) * gtau * chi0
    )
    return math.log(0.5) - 2.0 * abs(alpha0) ** 2 * bracket


def coherence_function(t: float, alpha0: complex, cfg: FeedbackConfig) -> float:
    """
    <D(2 a0, t)> on the even cat for Re(a0) = 0, phi = 0.

    From 2 tau on this is the small-delay closed form; before 2 tau the exact
    early segment of the dominant off-diagonal term is used. Plotting
    conventions multiply by 2.
    """
    return math.exp(log_coherence_function(t, alpha0, cfg))
