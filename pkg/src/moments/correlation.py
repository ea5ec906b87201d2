"""
Two-time correlation, the variance sigma2 and the Gaussian moment recursion.

Conventions: sigma2 is twice the usual variance (vacuum value 1/2) and
G(t, t') is the noise part of the correlation, so that
sigma2(t) = chi(t)^2 / 2 + 2 G(t, t).
"""

import math
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict
from scipy.special import exprel, factorial2

from dde.series import get_evaluator, quadrature_matrix_element
from model.schema import FeedbackConfig, delay_knots, overlap
from moments.quadrature import adaptive_simpson

Pair = Tuple[complex, complex]


class QuadratureMoments(BaseModel):
    """Mean factor and variance of the measured quadrature at one time."""

    model_config = ConfigDict(frozen=True)

    t: float
    mean_factor: float
    sigma2: float
    config: FeedbackConfig


def _kinks(shifted_starts: List[float], upper: float, tau: float) -> List[float]:
    """Points s in (0, upper) where a - s hits a multiple of tau for some start a."""
    if tau <= 0:
        return []
    out = []
    for a in shifted_starts:
        n = 1
        while a - n * tau > 0:
            s = a - n * tau
            if s < upper:
                out.append(s)
            n += 1
    return sorted(out)


def g_function(t: float, t2: float, cfg: FeedbackConfig) -> float:
    """
    Noise part G(t, t') of the two-time quadrature correlation.

    (gamma/4) { int_0^{min(t,t')} chi(t-s) chi(t'-s)
                - k Theta(t'-tau) int_0^{min(t,t'-tau)} chi(t-s) chi(t'-tau-s)
                - k Theta(t-tau) int_0^{min(t-tau,t')} chi(t-tau-s) chi(t'-s)
                + (k^2/eta) Theta(t-tau) Theta(t'-tau) int_0^{min(t-tau,t'-tau)} ... }
    """
    ev = get_evaluator(cfg)
    k = cfg.k
    tau = cfg.tau

    def piece(a: float, b: float) -> float:
        upper = min(a, b)
        if upper <= 0:
            return 0.0
        return adaptive_simpson(
            lambda s: ev.chi(max(a - s, 0.0)) * ev.chi(max(b - s, 0.0)),
            0.0,
            upper,
            knots=_kinks([a, b], upper, tau),
        )

    total = piece(t, t2)
    if k != 0:
        if t2 >= tau:
            total -= k * piece(t, t2 - tau)
        if t >= tau:
            total -= k * piece(t - tau, t2)
        if t >= tau and t2 >= tau:
            total += k * k / cfg.eta * piece(t - tau, t2 - tau)
    return 0.25 * cfg.gamma * total


def correlation(t: float, t2: float, pair: Pair, cfg: FeedbackConfig) -> complex:
    """C(t, t') = C(0,0) chi(t) chi(t') + <beta|alpha> G(t, t') for the pair (beta, alpha)."""
    beta, alpha = complex(pair[0]), complex(pair[1])
    ov = overlap(beta, alpha)
    ev = get_evaluator(cfg)
    c00 = initial_second_moment(beta, alpha, cfg.phi)
    return c00 * ev.chi(t) * ev.chi(t2) + ov * g_function(t, t2, cfg)


def initial_second_moment(beta: complex, alpha: complex, phi: float) -> complex:
    """<beta| X_phi^2 |alpha> = <beta|alpha> [((alpha e^{-i phi} + beta* e^{i phi}) / 2)^2 + 1/4]."""
    ov = overlap(beta, alpha)
    if ov == 0:
        return 0j
    m0 = quadrature_matrix_element(beta, alpha, phi) / ov
    return ov * (m0 * m0 + 0.25)


def sigma2(t: float, cfg: FeedbackConfig) -> float:
    """1/2 + (gamma k^2 / (2 eta)) Theta(t - tau) int_0^{t - tau} chi^2(s) ds."""
    t = float(t)
    if t <= cfg.tau or cfg.k == 0:
        return 0.5
    ev = get_evaluator(cfg)
    upper = t - cfg.tau
    integral = adaptive_simpson(
        lambda s: ev.chi(s) ** 2, 0.0, upper, knots=delay_knots(0.0, upper, cfg.tau)
    )
    return 0.5 + 0.5 * cfg.gamma * cfg.k ** 2 / cfg.eta * integral


def _markov_integral(t: float, cfg: FeedbackConfig) -> float:
    """gamma * int_0^t exp(-(1-2k) gamma s) ds, finite at k = 1/2."""
    gt = cfg.gamma * t
    x = (1.0 - 2.0 * cfg.k) * gt
    return gt * math.exp(-x) * float(exprel(x))


def sigma2_markov(t: float, cfg: FeedbackConfig) -> float:
    """Zero-delay variance 1/2 + (k^2 / (2 eta)) (1 - e^{-(1-2k) gamma t}) / (1 - 2k)."""
    return 0.5 + 0.5 * cfg.k ** 2 / cfg.eta * _markov_integral(float(t), cfg)


def sigma2_first_order(t: float, cfg: FeedbackConfig) -> float:
    """Variance to first order in gamma*tau (valid for t > tau; 1/2 before)."""
    t = float(t)
    if cfg.tau > 0 and t <= cfg.tau:
        return 0.5
    k = cfg.k
    f0 = _markov_integral(t, cfg)
    f1 = (1.0 + cfg.gamma * t * k) * math.exp(-(1.0 - 2.0 * k) * cfg.gamma * t) + k * f0
    return sigma2_markov(t, cfg) - 0.5 * k * k / cfg.eta * f1 * cfg.gamma * cfg.tau


def _double_factorial(n: int) -> float:
    return float(factorial2(n - 1)) if n > 1 else 1.0


def central_moment(n: int, t: float, pair: Pair, cfg: FeedbackConfig) -> complex:
    """Moment of order n about the scaled mean: <beta|alpha> (n-1)!!/2^(n/2) sigma2^(n/2), zero for odd n."""
    if n < 0:
        raise ValueError(f"moment order must be >= 0, got {n}")
    ov = overlap(complex(pair[0]), complex(pair[1]))
    if n % 2 == 1:
        return 0j
    if n == 0:
        return ov
    return ov * _double_factorial(n) / 2 ** (n // 2) * sigma2(t, cfg) ** (n // 2)


def shifted_moment(n: int, t: float, pair: Pair, cfg: FeedbackConfig) -> complex:
    """Moment of X(t) - chi(t) X(0): <beta|alpha> (n-1)!! G(t,t)^(n/2), zero for odd n."""
    if n < 0:
        raise ValueError(f"moment order must be >= 0, got {n}")
    ov = overlap(complex(pair[0]), complex(pair[1]))
    if n % 2 == 1:
        return 0j
    if n == 0:
        return ov
    return ov * _double_factorial(n) * g_function(t, t, cfg) ** (n // 2)


def quadrature_moments(t: float, cfg: FeedbackConfig) -> QuadratureMoments:
    return QuadratureMoments(
        t=t, mean_factor=get_evaluator(cfg).chi(t), sigma2=sigma2(t, cfg), config=cfg
    )
