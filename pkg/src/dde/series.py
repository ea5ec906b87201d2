"""
Delay-series solution of the mean-quadrature equation.

chi(t) = sum_{n=0}^{floor(t/tau)} k^n / n! * exp(-x_n/2) * x_n^n,  x_n = gamma (t - n tau)

solves  d chi/dt = -(gamma/2) chi(t) + k gamma chi(t - tau) Theta(t - tau),  chi(0) = 1.
For tau = 0 the sum collapses to exp(-(1 - 2k) gamma t / 2).
"""

import math
import threading
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy.special import exprel, gammaln

from config import config
from model.errors import DomainError, SeriesOverflowError, TermCapExceededError
from model.schema import FeedbackConfig, overlap
from utils.logger import logger

ArrayLike = Union[float, np.ndarray]

SUMMATION_MODES = ("log-domain-signed", "direct-kahan")

# Largest exponent math.exp accepts without overflow, with margin.
_SAFE_LOG = 700.0
# factorial(171) overflows a double.
_DIRECT_MAX_N = 170
# floor(t/tau) tolerance so that t = n*tau computed in floating point lands on n.
_FLOOR_EPS = 1e-9


class Derivative(NamedTuple):
    value: float
    at_kink: bool


class ChiEvaluator:
    """
    Evaluates chi, its derivative and the excess ratio for one parameter set.

    Immutable after construction and safe to share between threads.

    Args:
        cfg: Physical parameters.
        term_cap: Largest allowed series index floor(t/tau).
        summation_mode: "log-domain-signed" (default) builds every term from
            its logarithm and sign; "direct-kahan" multiplies powers directly
            and raises SeriesOverflowError once a term leaves double range.
    """

    def __init__(
        self,
        cfg: FeedbackConfig,
        term_cap: Optional[int] = None,
        summation_mode: str = "log-domain-signed",
    ):
        if summation_mode not in SUMMATION_MODES:
            raise ValueError(
                f"Unknown summation mode: {summation_mode}. "
                f"Must be one of: {', '.join(SUMMATION_MODES)}"
            )
        self.config = cfg
        self.term_cap = config.term_cap if term_cap is None else int(term_cap)
        self.summation_mode = summation_mode
        self.gamma = cfg.gamma
        self.tau = cfg.tau
        self.k = cfg.k
        # Nested quadratures revisit the same abscissae.
        self._chi_cached = lru_cache(maxsize=65536)(self._chi)

    # ------------------------------------------------------------------
    # scalar evaluation
    # ------------------------------------------------------------------

    def n_terms(self, t: float) -> int:
        """Index of the last contributing term, floor(t / tau)."""
        if self.tau == 0:
            return 0
        n = int(math.floor(t / self.tau + _FLOOR_EPS))
        if n > self.term_cap:
            raise TermCapExceededError(
                f"floor(t/tau) = {n} exceeds term_cap = {self.term_cap} "
                f"(t={t}, tau={self.tau}); use the tau = 0 form or chi_first_order"
            )
        return n

    def _check_time(self, t: float) -> float:
        t = float(t)
        if not t >= 0:
            raise DomainError(f"chi is defined for t >= 0, got t={t}")
        return t

    def _series(self, t: float, shift: int) -> float:
        """sum_{n >= shift} k^(n - shift) / n! * exp(-x_n/2) x_n^n."""
        n_max = self.n_terms(t)
        if n_max < shift:
            return 0.0

        terms: List[float] = []
        for n in range(shift, n_max + 1):
            x = max(self.gamma * (t - n * self.tau), 0.0)
            p = n - shift
            if n > 0 and x == 0.0:
                continue
            if p > 0 and self.k == 0.0:
                break
            if self.summation_mode == "direct-kahan":
                terms.append(self._direct_term(n, p, x))
            else:
                terms.append(self._log_term(n, p, x))
        return math.fsum(terms)

    def _log_term(self, n: int, p: int, x: float) -> float:
        log_mag = -0.5 * x - float(gammaln(n + 1))
        if p > 0:
            log_mag += p * math.log(abs(self.k))
        if n > 0:
            log_mag += n * math.log(x)
        sign = -1.0 if (self.k < 0 and p % 2 == 1) else 1.0
        return sign * math.exp(log_mag)

    def _direct_term(self, n: int, p: int, x: float) -> float:
        if n > _DIRECT_MAX_N:
            raise SeriesOverflowError(
                f"term n={n} overflows direct summation; use summation_mode='log-domain-signed'"
            )
        log_power = n * math.log(x) if n > 0 else 0.0
        log_gain = p * math.log(abs(self.k)) if p > 0 else 0.0
        if max(abs(log_power), abs(log_gain), math.lgamma(n + 1)) > _SAFE_LOG:
            raise SeriesOverflowError(
                f"term n={n} leaves double range (log x^n = {log_power:.1f}); "
                "use summation_mode='log-domain-signed'"
            )
        return self.k ** p / math.factorial(n) * math.exp(-0.5 * x) * x ** n

    def chi(self, t: float) -> float:
        return self._chi_cached(self._check_time(t))

    def _chi(self, t: float) -> float:
        if t == 0:
            return 1.0
        if self.tau == 0:
            return math.exp(-0.5 * (1.0 - 2.0 * self.k) * self.gamma * t)
        return self._series(t, 0)

    def damping(self, t: float) -> float:
        """Unfed solution exp(-gamma t / 2)."""
        return math.exp(-0.5 * self.gamma * float(t))

    def excess_ratio(self, t: float) -> float:
        """(chi(t) - exp(-gamma t/2)) / k, finite at k = 0.

        Summed as the shifted series sum_{n>=1} k^(n-1)/n! exp(-x_n/2) x_n^n,
        so no division by k ever happens.
        """
        t = self._check_time(t)
        if t == 0:
            return 0.0
        if self.tau == 0:
            gt = self.gamma * t
            return math.exp(-0.5 * gt) * gt * float(exprel(self.k * gt))
        return self._series(t, 1)

    def is_kink(self, t: float) -> bool:
        if self.tau == 0 or t < self.tau * (1 - _FLOOR_EPS):
            return False
        ratio = t / self.tau
        return abs(ratio - round(ratio)) < _FLOOR_EPS

    def chi_derivative(self, t: float) -> Derivative:
        """Termwise derivative of the series.

        Differentiating term n gives -(gamma/2) times itself plus
        gamma k times term n-1 of chi(t - tau), i.e. the right-hand side of
        the delay equation. At t = n tau the right-sided value is returned
        with ``at_kink`` set.
        """
        t = self._check_time(t)
        if self.tau == 0:
            return Derivative(-0.5 * self.gamma * (1.0 - 2.0 * self.k) * self.chi(t), False)
        value = -0.5 * self.gamma * self.chi(t)
        if t >= self.tau * (1 - _FLOOR_EPS):
            value += self.k * self.gamma * self.chi(max(t - self.tau, 0.0))
        return Derivative(value, self.is_kink(t))

    def excess_ratio_derivative(self, t: float) -> float:
        """d/dt excess_ratio = -(gamma/2) excess_ratio + gamma Theta(t-tau) chi(t-tau)."""
        t = self._check_time(t)
        value = -0.5 * self.gamma * self.excess_ratio(t)
        if t >= self.tau * (1 - _FLOOR_EPS):
            value += self.gamma * self.chi(max(t - self.tau, 0.0))
        return value

    def chi_first_order(self, t: float) -> float:
        """First order in gamma*tau: {1 - (k/2)(2 - gamma t (1-2k)) gamma tau} exp(-(1-2k) gamma t/2).

        Meant for t > tau; before the loop closes the unfed decay is returned.
        """
        t = float(t)
        if self.tau > 0 and t < self.tau:
            return self.damping(t)
        g_t = self.gamma * float(t)
        k = self.k
        return (1.0 - 0.5 * k * (2.0 - g_t * (1.0 - 2.0 * k)) * self.gamma * self.tau) * math.exp(
            -0.5 * (1.0 - 2.0 * k) * g_t
        )

    # ------------------------------------------------------------------
    # vectorized evaluation
    # ------------------------------------------------------------------

    def values(self, ts: ArrayLike) -> np.ndarray:
        """chi on an array of times."""
        return self._vector(ts, shift=0)

    def excess_values(self, ts: ArrayLike) -> np.ndarray:
        """excess_ratio on an array of times."""
        return self._vector(ts, shift=1)

    def _vector(self, ts: ArrayLike, shift: int) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if np.any(ts < 0):
            raise DomainError("chi is defined for t >= 0")
        flat = ts.ravel()
        g = self.gamma

        if self.tau == 0:
            if shift == 0:
                out = np.exp(-0.5 * (1.0 - 2.0 * self.k) * g * flat)
            else:
                out = np.exp(-0.5 * g * flat) * g * flat * exprel(self.k * g * flat)
            return out.reshape(ts.shape)

        if flat.size == 0:
            return flat.reshape(ts.shape)
        n_max = self.n_terms(float(flat.max()))
        counts = np.floor(flat / self.tau + _FLOOR_EPS)

        # Neumaier-compensated sum over the series index, vectorized over t.
        total = np.zeros_like(flat)
        comp = np.zeros_like(flat)
        log_k = math.log(abs(self.k)) if self.k != 0 else -np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            for n in range(shift, n_max + 1):
                p = n - shift
                if p > 0 and self.k == 0:
                    break
                x = np.maximum(g * (flat - n * self.tau), 0.0)
                log_mag = -0.5 * x - gammaln(n + 1)
                if n > 0:
                    log_mag = log_mag + n * np.log(x)
                if p > 0:
                    log_mag = log_mag + p * log_k
                term = np.exp(log_mag)
                if self.k < 0 and p % 2 == 1:
                    term = -term
                term = np.where(counts >= n, term, 0.0)
                term = np.nan_to_num(term, nan=0.0)
                s = total + term
                comp += np.where(np.abs(total) >= np.abs(term), (total - s) + term, (term - s) + total)
                total = s
        return (total + comp).reshape(ts.shape)


# ----------------------------------------------------------------------
# Evaluator registry (one evaluator per parameter set)
# ----------------------------------------------------------------------

_evaluators: Dict[Tuple[FeedbackConfig, int, str], ChiEvaluator] = {}
_evaluators_lock = threading.Lock()


def get_evaluator(
    cfg: FeedbackConfig,
    term_cap: Optional[int] = None,
    summation_mode: str = "log-domain-signed",
) -> ChiEvaluator:
    cap = config.term_cap if term_cap is None else int(term_cap)
    key = (cfg, cap, summation_mode)
    with _evaluators_lock:
        evaluator = _evaluators.get(key)
        if evaluator is None:
            evaluator = ChiEvaluator(cfg, term_cap=cap, summation_mode=summation_mode)
            _evaluators[key] = evaluator
            logger.debug(f"New chi evaluator (k={cfg.k:.6g}, tau={cfg.tau}, mode={summation_mode})")
    return evaluator


def reset_evaluators() -> None:
    with _evaluators_lock:
        _evaluators.clear()


# ----------------------------------------------------------------------
# Functional API
# ----------------------------------------------------------------------


def chi(t: float, cfg: FeedbackConfig) -> float:
    return get_evaluator(cfg).chi(t)


def chi_derivative(t: float, cfg: FeedbackConfig) -> Derivative:
    return get_evaluator(cfg).chi_derivative(t)


def chi_first_order(t: float, cfg: FeedbackConfig) -> float:
    return get_evaluator(cfg).chi_first_order(t)


def excess_ratio(t: float, cfg: FeedbackConfig) -> float:
    return get_evaluator(cfg).excess_ratio(t)


def quadrature_matrix_element(beta: complex, alpha: complex, phi: float) -> complex:
    """<beta| X_phi |alpha> = <beta|alpha> (alpha e^{-i phi} + beta* e^{i phi}) / 2."""
    beta = complex(beta)
    alpha = complex(alpha)
    phase = complex(math.cos(phi), math.sin(phi))
    return overlap(beta, alpha) * (alpha * phase.conjugate() + beta.conjugate() * phase) / 2


def mean_quadrature(t: float, x0: complex, cfg: FeedbackConfig) -> complex:
    """<X_phi(t)> = <X_phi(0)> chi(t)."""
    return complex(x0) * chi(t, cfg)
