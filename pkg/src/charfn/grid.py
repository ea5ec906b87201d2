"""
Uniform time grids aligned with the feedback delay, and the kernel tables
sampled on them.

A grid has step h with tau = m h and the target time t = J h. Kernels are
tabulated on the nodes d_j = j h, j = 0..J + m, which covers every argument
t - r + tau the noise integrals need.
"""

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from dde.kernels import KernelSet
from dde.series import get_evaluator
from model.errors import RegimeWarning
from model.schema import FeedbackConfig
from utils.logger import logger

# Largest denominator accepted when writing t / tau as a fraction.
_MAX_DENOMINATOR = 2048
_RATIO_TOL = 1e-10


@dataclass(frozen=True)
class GridPlan:
    step: float
    m: int
    n: int

    @property
    def t_end(self) -> float:
        return self.n * self.step

    def refined(self) -> "GridPlan":
        return GridPlan(step=self.step / 2, m=2 * self.m, n=2 * self.n)


def default_step(cfg: FeedbackConfig) -> float:
    """min(tau/8, 1/(64 gamma)); 1/(64 gamma) without delay."""
    base = 1.0 / (64.0 * cfg.gamma)
    return min(cfg.tau / 8.0, base) if cfg.tau > 0 else base


def plan_grid(cfg: FeedbackConfig, t: float, max_step: Optional[float] = None) -> GridPlan:
    """
    Step h <= max_step with tau = m h and t = n h.

    When t / tau has no small rational form, t is snapped to the closest
    commensurate time and a RegimeWarning is issued.
    """
    h0 = default_step(cfg) if max_step is None else float(max_step)
    t = float(t)
    if t <= 0:
        if cfg.tau > 0:
            m = max(1, int(math.ceil(cfg.tau / h0 - 1e-12)))
            return GridPlan(step=cfg.tau / m, m=m, n=0)
        return GridPlan(step=h0, m=0, n=0)

    if cfg.tau == 0:
        n = max(1, int(math.ceil(t / h0 - 1e-12)))
        return GridPlan(step=t / n, m=0, n=n)

    exact = t / cfg.tau
    ratio = Fraction(exact).limit_denominator(_MAX_DENOMINATOR)
    if abs(float(ratio) - exact) > _RATIO_TOL * max(1.0, exact):
        snapped = float(ratio) * cfg.tau
        message = f"t={t} is not commensurate with tau={cfg.tau}; evaluating at t={snapped}"
        logger.warning(message)
        warnings.warn(message, RegimeWarning, stacklevel=2)

    base = cfg.tau / ratio.denominator
    c = max(1, int(math.ceil(base / h0 - 1e-12)))
    plan = GridPlan(step=base / c, m=ratio.denominator * c, n=ratio.numerator * c)
    logger.debug(f"grid plan: h={plan.step:.4g}, m={plan.m}, n={plan.n}")
    return plan


class KernelTable:
    """chi, rho, E and the four R-type kernels sampled on the nodes of a plan."""

    def __init__(self, cfg: FeedbackConfig, plan: GridPlan):
        self.config = cfg
        self.plan = plan
        ev = get_evaluator(cfg)
        size = plan.n + plan.m + 1
        nodes = plan.step * np.arange(size)
        # Node m is tau itself; keep the product exact there.
        if plan.m > 0 and plan.m < size:
            nodes[plan.m] = cfg.tau

        kernels = KernelSet(cfg, ev)
        self.nodes = nodes
        self.chi = ev.values(nodes)
        self.rho = ev.excess_values(nodes)
        self.damping = np.exp(-0.5 * cfg.gamma * nodes)
        self.R = kernels.R(nodes)
        self.R1 = kernels.R1(nodes)
        self.R_f = kernels.R_f(nodes)
        self.R1_f = kernels.R1_f(nodes)

    def r_lambda(self, lam: complex) -> np.ndarray:
        """R_lambda = lambda R1 - lambda* R."""
        return lam * self.R1 - np.conj(lam) * self.R

    def r_lambda_f(self, lam: complex) -> np.ndarray:
        return lam * self.R1_f - np.conj(lam) * self.R_f
