"""
Exact characteristic function <D(lambda, t)>_{beta alpha} = <D(lambda, 0)> exp(int_0^t H).

The exponent H splits into pieces with closed-form integrals and a noise
part H_W(s) built from W_lambda(s - tau, s) and W_lambda(s - 2 tau, s):

int_0^t H = (lambda* alpha - lambda beta*)(1 - E(t))
            + Theta(t - tau) [(i/2) L X g rho(t) - gamma g^2 L^2 (t - tau) / (8 eta)]
            + int_tau^t H_W(s) ds

with L = lambda e^{-i theta} + lambda* e^{i theta}, X = beta* e^{i phi} + alpha e^{-i phi}
and rho the excess ratio. Only the last integral is numerical. It is done
on a delay-aligned grid with trapezoid sums for the inner convolutions and
one Richardson step over the whole pipeline.

W_lambda is real-linear in lambda, so the grid work is done once for the
basis lambda in {1, i} and reused for every lambda.
"""

import cmath
import math
import threading
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import cumulative_trapezoid
from scipy.signal import fftconvolve

from charfn.closed_form import (
    log_displacement_matrix_element,
    quadrature_weight,
)
from charfn.grid import GridPlan, KernelTable, plan_grid
from dde.kernels import KernelSet
from dde.series import get_evaluator
from model.errors import DomainError
from model.schema import Complex, FeedbackConfig
from model.states import cat_state
from utils.logger import logger

# exp() of anything below this underflows to zero in double precision.
_UNDERFLOW_LOG = -745.0
_NODE_TOL = 1e-9


def closed_part(lam: complex, t: float, alpha: complex, beta: complex, cfg: FeedbackConfig) -> complex:
    """log <D(lambda, 0)> plus the exactly integrated pieces of the exponent."""
    lam, alpha, beta = complex(lam), complex(alpha), complex(beta)
    ev = get_evaluator(cfg)
    value = log_displacement_matrix_element(lam, alpha, beta)
    value += (lam.conjugate() * alpha - lam * beta.conjugate()) * (1.0 - ev.damping(t))
    if t >= cfg.tau:
        weight = quadrature_weight(lam, cfg.theta)
        e_phi = cmath.exp(1j * cfg.phi)
        x = beta.conjugate() * e_phi + alpha * e_phi.conjugate()
        value += 0.5j * weight * x * cfg.g * ev.excess_ratio(t)
        value -= cfg.gamma * cfg.g ** 2 * weight ** 2 * (t - cfg.tau) / (8.0 * cfg.eta)
    return value


class CharFnResult(BaseModel):
    """Value of <D(lambda, t)> together with its logarithm and provenance."""

    model_config = ConfigDict(frozen=True)

    t: float
    value: Complex
    log_value: Complex
    branch: Literal["exact", "small_tau", "early", "closed_form"]
    underflow: bool = False

    @classmethod
    def from_log(cls, t: float, log_value: complex, branch: str) -> "CharFnResult":
        underflow = log_value.real < _UNDERFLOW_LOG
        value = 0j if underflow else cmath.exp(log_value)
        return cls(t=t, value=value, log_value=log_value, branch=branch, underflow=underflow)


class CharFnKernels:
    """V_lambda, R_lambda, R_lambda^f, Lambda_lambda and W_lambda of one parameter set."""

    def __init__(self, cfg: FeedbackConfig):
        self.config = cfg
        self.evaluator = get_evaluator(cfg)
        self.kernel_set = KernelSet(cfg, self.evaluator)
        self.sqrt_gamma = math.sqrt(cfg.gamma)
        self.sqrt_eta = math.sqrt(cfg.eta)
        self.e_phi = cmath.exp(1j * cfg.phi)
        self.e_theta = cmath.exp(1j * cfg.theta)

    def V(self, lam: complex, t: float) -> complex:
        """V_lambda(t) = -lambda E(t) - (i/2) e^{i phi} L g rho(t) Theta(t - tau)."""
        lam = complex(lam)
        value = -lam * self.evaluator.damping(t)
        if t >= self.config.tau:
            weight = quadrature_weight(lam, self.config.theta)
            value -= 0.5j * self.e_phi * weight * self.config.g * self.evaluator.excess_ratio(t)
        return value

    def R_lambda(self, lam: complex, d):
        return lam * self.kernel_set.R1(d) - np.conj(lam) * self.kernel_set.R(d)

    def R_lambda_f(self, lam: complex, d):
        return lam * self.kernel_set.R1_f(d) - np.conj(lam) * self.kernel_set.R_f(d)

    def profiles(self, lam: complex, table: KernelTable, s_index: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Lambda_lambda(sigma, s) and W_lambda(sigma, s) at s = s_index h for the
        nodes sigma = 0, h, ..., s - tau.
        """
        cfg = self.config
        plan = table.plan
        h, m = plan.step, plan.m
        n = s_index - m + 1
        if n <= 0:
            empty = np.zeros(0, dtype=complex)
            return empty, empty

        j = np.arange(n)
        r_l = table.r_lambda(lam)
        rf_l = table.r_lambda_f(lam)

        source = np.conj(r_l[s_index - j])
        if cfg.k != 0:
            delayed = np.zeros(n, dtype=complex)
            on = j >= m
            delayed[on] = np.conj(rf_l[s_index - j[on] + m])
            source = source - cfg.k / self.sqrt_eta * delayed

        chi = table.chi[:n]
        conv = fftconvolve(chi, source)[:n]
        conv = h * (conv - 0.5 * (chi * source[0] + chi[0] * source))

        s = table.nodes[s_index]
        v_conj = np.conj(self.V(lam, s))
        lam_profile = -0.5 * self.sqrt_gamma * self.e_phi * conv + 0.5 * self.e_phi * chi * v_conj

        sigma = table.nodes[:n]
        integrand = np.exp(0.5 * cfg.gamma * sigma) * (
            2.0 * self.sqrt_gamma * lam_profile
            + self.e_phi * np.conj(rf_l[s_index - j]) / self.sqrt_eta
        )
        w = cumulative_trapezoid(integrand, dx=h, initial=0)
        w = -0.5j * self.sqrt_gamma * cfg.g * self.e_theta * w
        return lam_profile, w

    def _pointwise(self, lam: complex, sigma: float, t: float, which: int, max_step: Optional[float]) -> complex:
        cfg = self.config
        if not 0 <= sigma <= t - cfg.tau + _NODE_TOL:
            raise DomainError(
                f"profiles are evaluated for 0 <= sigma <= t - tau, got sigma={sigma}, t={t}, tau={cfg.tau}"
            )
        plan = plan_grid(cfg, t, max_step)
        values = []
        for level in (plan, plan.refined()):
            table = KernelTable(cfg, level)
            prof = self.profiles(lam, table, level.n)[which]
            xs = table.nodes[: len(prof)]
            values.append(np.interp(sigma, xs, prof.real) + 1j * np.interp(sigma, xs, prof.imag))
        coarse, fine = values
        return complex((4.0 * fine - coarse) / 3.0)

    def Lambda(self, lam: complex, sigma: float, t: float, max_step: Optional[float] = None) -> complex:
        return self._pointwise(lam, sigma, t, 0, max_step)

    def W(self, lam: complex, u: float, t: float, max_step: Optional[float] = None) -> complex:
        return self._pointwise(lam, u, t, 1, max_step)


class _Level:
    """Basis profiles W_b(s - tau, s), W_b(s - 2 tau, s) for b in {1, i} on one grid."""

    def __init__(self, kernels: CharFnKernels, plan: GridPlan):
        self.kernels = kernels
        self.plan = plan
        self.table = KernelTable(kernels.config, plan)
        self._basis: Optional[Tuple[np.ndarray, np.ndarray]] = None
        self._lock = threading.Lock()

    def basis(self) -> Tuple[np.ndarray, np.ndarray]:
        with self._lock:
            if self._basis is None:
                self._basis = self._build_basis()
        return self._basis

    def _build_basis(self) -> Tuple[np.ndarray, np.ndarray]:
        plan = self.plan
        m, n = plan.m, plan.n
        lagged = np.zeros((2, n + 1), dtype=complex)
        twice_lagged = np.zeros((2, n + 1), dtype=complex)
        for bi, b in enumerate((1.0 + 0j, 1j)):
            for s in range(m, n + 1):
                _, w = self.kernels.profiles(b, self.table, s)
                lagged[bi, s] = w[s - m]
                if s >= 2 * m:
                    twice_lagged[bi, s] = w[s - 2 * m]
        logger.debug(f"charfn basis built on {n + 1} nodes (h={plan.step:.4g})")
        return lagged, twice_lagged

    def h_w(self, lam: complex) -> np.ndarray:
        """Noise part H_W(s) of the exponent on every node."""
        lagged_b, twice_b = self.basis()
        lagged = lam.real * lagged_b[0] + lam.imag * lagged_b[1]
        twice = lam.real * twice_b[0] + lam.imag * twice_b[1]
        return self._assemble(lam, lagged, twice, np.arange(self.plan.n + 1))

    def h_w_at(self, lam: complex, s_index: int) -> complex:
        m = self.plan.m
        if s_index < m:
            return 0j
        _, w = self.kernels.profiles(lam, self.table, s_index)
        lagged = np.zeros(s_index + 1, dtype=complex)
        twice = np.zeros(s_index + 1, dtype=complex)
        lagged[s_index] = w[s_index - m]
        if s_index >= 2 * m:
            twice[s_index] = w[s_index - 2 * m]
        return complex(self._assemble(lam, lagged, twice, np.arange(s_index + 1))[s_index])

    def _assemble(self, lam: complex, lagged: np.ndarray, twice: np.ndarray, nodes: np.ndarray) -> np.ndarray:
        cfg = self.kernels.config
        m = self.plan.m
        damping = self.table.damping
        out = np.zeros(len(nodes), dtype=complex)

        idx = nodes[nodes >= m]
        out[idx] = 0.5 * cfg.gamma * damping[idx - m] * (
            np.conj(lam) * lagged[idx] + lam * np.conj(lagged[idx])
        )

        idx = nodes[nodes >= 2 * m]
        if cfg.g != 0 and len(idx):
            weight = quadrature_weight(lam, cfg.theta)
            e_phi = self.kernels.e_phi
            out[idx] += 0.5j * cfg.gamma * cfg.g * weight * damping[idx - 2 * m] * (
                np.conj(e_phi) * twice[idx] - e_phi * np.conj(twice[idx])
            )
        return out


class CharFnSolver:
    """
    Grid solver for the exact characteristic function of one parameter set
    on [0, t_max].

    Args:
        cfg: Physical parameters.
        t_max: Last time of interest; snapped to the delay-aligned grid.
        max_step: Largest grid step (default min(tau/8, 1/(64 gamma))).
        richardson: Combine step h and h/2 as (4 I_{h/2} - I_h) / 3.
    """

    def __init__(
        self,
        cfg: FeedbackConfig,
        t_max: float,
        max_step: Optional[float] = None,
        richardson: bool = True,
    ):
        self.config = cfg
        self.plan = plan_grid(cfg, t_max, max_step)
        self.kernels = CharFnKernels(cfg)
        self.levels: List[_Level] = [_Level(self.kernels, self.plan)]
        if richardson:
            self.levels.append(_Level(self.kernels, self.plan.refined()))

    @property
    def t_end(self) -> float:
        return self.plan.t_end

    def times(self) -> np.ndarray:
        return self.levels[0].table.nodes[: self.plan.n + 1]

    def node_index(self, t: float) -> int:
        idx = int(round(t / self.plan.step))
        if idx < 0 or idx > self.plan.n or abs(idx * self.plan.step - t) > _NODE_TOL * max(1.0, t):
            raise DomainError(f"t={t} is not a node of the solver grid (h={self.plan.step})")
        return idx

    def noise_integral(self, lam: complex) -> np.ndarray:
        """int_0^s H_W on the coarse nodes."""
        lam = complex(lam)
        coarse_level = self.levels[0]
        coarse = cumulative_trapezoid(coarse_level.h_w(lam), dx=coarse_level.plan.step, initial=0)
        if len(self.levels) == 1:
            return coarse
        fine_level = self.levels[1]
        fine = cumulative_trapezoid(fine_level.h_w(lam), dx=fine_level.plan.step, initial=0)[::2]
        logger.debug(f"Richardson correction {np.max(np.abs(fine - coarse)) if len(fine) else 0.0:.3e}")
        return (4.0 * fine - coarse) / 3.0

    def log_curve(self, lam: complex, alpha: complex, beta: complex) -> Tuple[np.ndarray, np.ndarray]:
        """log <D(lambda, t)> on every coarse node."""
        ts = self.times()
        noise = self.noise_integral(lam)
        closed = np.array([closed_part(lam, t, alpha, beta, self.config) for t in ts])
        return ts, closed + noise

    def evaluate(self, lam: complex, t: float, alpha: complex, beta: complex) -> CharFnResult:
        idx = self.node_index(t)
        t_node = idx * self.plan.step
        log_value = closed_part(lam, t_node, alpha, beta, self.config) + self.noise_integral(lam)[idx]
        return CharFnResult.from_log(t_node, complex(log_value), "exact")

    def noise_rate(self, lam: complex) -> complex:
        """H_W at t_end, Richardson-combined."""
        lam = complex(lam)
        values = [level.h_w_at(lam, level.plan.n) for level in self.levels]
        if len(values) == 1:
            return values[0]
        return (4.0 * values[1] - values[0]) / 3.0


# ----------------------------------------------------------------------
# Solver registry
# ----------------------------------------------------------------------

_solvers: Dict[Tuple[FeedbackConfig, GridPlan], CharFnSolver] = {}
_solvers_lock = threading.Lock()


def get_solver(cfg: FeedbackConfig, t_max: float, max_step: Optional[float] = None) -> CharFnSolver:
    plan = plan_grid(cfg, t_max, max_step)
    key = (cfg, plan)
    with _solvers_lock:
        solver = _solvers.get(key)
        if solver is None:
            solver = CharFnSolver(cfg, t_max, max_step)
            _solvers[key] = solver
    return solver


def reset_solvers() -> None:
    with _solvers_lock:
        _solvers.clear()


# ----------------------------------------------------------------------
# Functional API
# ----------------------------------------------------------------------


def exact_result(
    lam: complex,
    t: float,
    alpha: complex,
    beta: complex,
    cfg: FeedbackConfig,
    max_step: Optional[float] = None,
) -> CharFnResult:
    t = float(t)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t <= cfg.tau or cfg.g == 0:
        # The noise part vanishes before the loop closes and without feedback.
        return CharFnResult.from_log(t, closed_part(lam, t, alpha, beta, cfg), "exact")
    return get_solver(cfg, t, max_step).evaluate(lam, t, alpha, beta)


def charfn_exact(
    lam: complex,
    t: float,
    alpha: complex,
    beta: complex,
    cfg: FeedbackConfig,
    max_step: Optional[float] = None,
) -> complex:
    """<D(lambda, 0)>_{beta alpha} exp(int_0^t H)."""
    return exact_result(lam, t, alpha, beta, cfg, max_step).value


def hamiltonian_exponent(
    t: float,
    lam: complex,
    alpha: complex,
    beta: complex,
    cfg: FeedbackConfig,
    max_step: Optional[float] = None,
) -> complex:
    """
    H(t) = (gamma/2)(lambda* alpha - lambda beta*) E(t)
           + Theta(t - tau) [(i/2) L X g rho'(t) - gamma g^2 L^2 / (8 eta)]
           + H_W(t)
    """
    t = float(t)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    lam, alpha, beta = complex(lam), complex(alpha), complex(beta)
    ev = get_evaluator(cfg)
    value = 0.5 * cfg.gamma * (lam.conjugate() * alpha - lam * beta.conjugate()) * ev.damping(t)
    if t >= cfg.tau:
        weight = quadrature_weight(lam, cfg.theta)
        e_phi = cmath.exp(1j * cfg.phi)
        x = beta.conjugate() * e_phi + alpha * e_phi.conjugate()
        value += 0.5j * weight * x * cfg.g * ev.excess_ratio_derivative(t)
        value -= cfg.gamma * cfg.g ** 2 * weight ** 2 / (8.0 * cfg.eta)
        if t > cfg.tau and cfg.g != 0:
            value += get_solver(cfg, t, max_step).noise_rate(lam)
    return value


def cat_coherence_exact(t: float, alpha0: complex, cfg: FeedbackConfig, max_step: Optional[float] = None) -> complex:
    """<D(2 a0, t)> on the normalized even cat, summed over all four pairs."""
    lam = 2.0 * complex(alpha0)
    total = 0j
    for alpha, beta, weight in cat_state(alpha0).pairs():
        total += weight * charfn_exact(lam, t, alpha, beta, cfg, max_step)
    return total


def cat_coherence_curve(
    t_max: float, alpha0: complex, cfg: FeedbackConfig, max_step: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """<D(2 a0, t)> on the cat for every node of one solver grid."""
    solver = get_solver(cfg, t_max, max_step)
    lam = 2.0 * complex(alpha0)
    ts = solver.times()
    total = np.zeros(len(ts), dtype=complex)
    for alpha, beta, weight in cat_state(alpha0).pairs():
        _, logs = solver.log_curve(lam, alpha, beta)
        total += weight * np.exp(logs)
    return ts, total
