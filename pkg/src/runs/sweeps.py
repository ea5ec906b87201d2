"""
Parameter families behind the CLI subcommands.

Every family returns plain arrays; writing them is left to runs.output.
Times and delays are given as gamma*t and gamma*tau.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from charfn.closed_form import coherence_function
from dde.series import get_evaluator
from distribution.marginal import fringe_contrast, marginal_pdf_grid
from model.schema import FeedbackConfig
from model.states import cat_state
from trajectories.fock import compare_with_closed_form
from trajectories.functionals import coherence_trajectory
from trajectories.paths import generate_path
from utils.logger import logger
from utils.parallel import map_ordered

DEFAULT_K = 0.45
CHI_GAMMA_TAUS = (0.0, 0.5, 1.0, 2.5, 5.0)
PDIST_GAMMA_TS = (0.0, 0.02, 0.05, 0.1)
COHERENCE_GAMMA_TAUS = (0.02, 0.01, 0.001, 0.0)
COHERENCE_ETAS = (0.75, 0.9, 0.95, 1.0)
PANEL_GAMMA_TAU = 0.01


@dataclass(frozen=True, eq=False)
class Curve:
    label: str
    params: Dict[str, float]
    x: np.ndarray
    y: np.ndarray


@dataclass(eq=False)
class Table:
    columns: List[str]
    data: np.ndarray

    def rows(self):
        return (tuple(row) for row in self.data)


def curves_table(curves: Sequence[Curve], param_names: Sequence[str], x_name: str, y_name: str) -> Table:
    """Long format: one row per (curve, x) with the curve index and parameters first."""
    blocks = []
    for index, curve in enumerate(curves):
        n = len(curve.x)
        cols = [np.full(n, index, dtype=float)]
        cols += [np.full(n, curve.params[name], dtype=float) for name in param_names]
        cols += [curve.x, curve.y]
        blocks.append(np.column_stack(cols))
    data = np.vstack(blocks) if blocks else np.zeros((0, len(param_names) + 3))
    return Table(columns=["curve", *param_names, x_name, y_name], data=data)


# ----------------------------------------------------------------------
# chi(t)
# ----------------------------------------------------------------------


def chi_curve(cfg: FeedbackConfig, gamma_ts: np.ndarray, label: Optional[str] = None) -> Curve:
    ts = np.asarray(gamma_ts, dtype=float) / cfg.gamma
    values = get_evaluator(cfg).values(ts)
    params = {"k": cfg.k, "gamma_tau": cfg.gamma * cfg.tau, "g": cfg.g}
    return Curve(label=label or f"k={cfg.k:g}, gamma_tau={params['gamma_tau']:g}", params=params,
                 x=np.asarray(gamma_ts, dtype=float), y=values)


def chi_family(
    gamma: float = 1.0,
    k: float = DEFAULT_K,
    gamma_taus: Sequence[float] = CHI_GAMMA_TAUS,
    gamma_t_max: float = 10.0,
    n_points: int = 201,
    reference: bool = True,
    threads: Optional[int] = None,
) -> List[Curve]:
    """chi(t) for each delay at fixed k, plus the g = 0 reference e^{-gamma t/2}."""
    gamma_ts = np.linspace(0.0, gamma_t_max, n_points)
    configs = [FeedbackConfig.from_k(k, gamma=gamma, tau=gt / gamma) for gt in gamma_taus]
    if reference:
        configs.append(FeedbackConfig(gamma=gamma))
    return map_ordered(lambda cfg: chi_curve(cfg, gamma_ts), configs, desc="chi curves", threads=threads)


# ----------------------------------------------------------------------
# P(x, t)
# ----------------------------------------------------------------------


def pdist_configs(gamma: float = 1.0, eta: float = 0.9) -> Dict[str, FeedbackConfig]:
    """No feedback; tau = 0, k = 1; gamma tau = 0.01, k = 1; same with eta < 1."""
    tau = PANEL_GAMMA_TAU / gamma
    return {
        "a": FeedbackConfig(gamma=gamma),
        "b": FeedbackConfig.from_k(1.0, gamma=gamma),
        "c": FeedbackConfig.from_k(1.0, gamma=gamma, tau=tau),
        "d": FeedbackConfig.from_k(1.0, gamma=gamma, tau=tau, eta=eta),
    }


@dataclass(frozen=True, eq=False)
class PdistSlice:
    panel: str
    gamma_t: float
    x: np.ndarray
    p: np.ndarray
    contrast: float


def pdist_slice(panel: str, cfg: FeedbackConfig, gamma_t: float, alpha0: complex, xs: np.ndarray) -> PdistSlice:
    t = gamma_t / cfg.gamma
    p = marginal_pdf_grid(xs, t, cat_state(alpha0), cfg)
    return PdistSlice(panel=panel, gamma_t=gamma_t, x=xs, p=p, contrast=fringe_contrast(t, alpha0, cfg))


def pdist_panels(
    alpha0: complex = 5j,
    gamma: float = 1.0,
    gamma_ts: Sequence[float] = PDIST_GAMMA_TS,
    xs: Optional[np.ndarray] = None,
    configs: Optional[Dict[str, FeedbackConfig]] = None,
    threads: Optional[int] = None,
) -> List[PdistSlice]:
    """P(x, t) of the even cat for every panel and time."""
    xs = np.linspace(-3.0, 3.0, 241) if xs is None else np.asarray(xs, dtype=float)
    configs = configs or pdist_configs(gamma)
    jobs = [(name, cfg, gt) for name, cfg in configs.items() for gt in gamma_ts]
    return map_ordered(
        lambda job: pdist_slice(job[0], job[1], job[2], alpha0, xs), jobs, desc="P(x,t) slices", threads=threads
    )


def pdist_table(slices: Sequence[PdistSlice]) -> Table:
    """Columns panel (index in order of first appearance: a = 0, b = 1, ...), gamma_t, x, p."""
    index = {name: i for i, name in enumerate(dict.fromkeys(s.panel for s in slices))}
    blocks = []
    for s in slices:
        n = len(s.x)
        blocks.append(np.column_stack([np.full(n, index[s.panel], dtype=float), np.full(n, s.gamma_t), s.x, s.p]))
    return Table(columns=["panel", "gamma_t", "x", "p"], data=np.vstack(blocks))


# ----------------------------------------------------------------------
# 2 <D(2 a0, t)>
# ----------------------------------------------------------------------


def coherence_curve(cfg: FeedbackConfig, alpha0: complex, gamma_ts: np.ndarray) -> Curve:
    """Plotting convention: twice the coherence function."""
    values = np.array([2.0 * coherence_function(gt / cfg.gamma, alpha0, cfg) for gt in gamma_ts])
    params = {"gamma_tau": cfg.gamma * cfg.tau, "eta": cfg.eta, "g": cfg.g, "k": cfg.k}
    return Curve(label=f"gamma_tau={params['gamma_tau']:g}, eta={cfg.eta:g}, g={cfg.g:g}", params=params,
                 x=np.asarray(gamma_ts, dtype=float), y=values)


def coherence_tau_family(
    alpha0: complex = 5j,
    gamma: float = 1.0,
    gamma_taus: Sequence[float] = COHERENCE_GAMMA_TAUS,
    k: float = 1.0,
    eta: float = 1.0,
    gamma_t_max: float = 0.1,
    n_points: int = 101,
    reference: bool = True,
    threads: Optional[int] = None,
) -> List[Curve]:
    gamma_ts = np.linspace(0.0, gamma_t_max, n_points)
    configs = [FeedbackConfig.from_k(k, gamma=gamma, tau=gt / gamma, eta=eta) for gt in gamma_taus]
    if reference:
        configs.append(FeedbackConfig(gamma=gamma))
    return map_ordered(lambda cfg: coherence_curve(cfg, alpha0, gamma_ts), configs, desc="coherence", threads=threads)


def coherence_eta_family(
    alpha0: complex = 5j,
    gamma: float = 1.0,
    etas: Sequence[float] = COHERENCE_ETAS,
    k: float = 1.0,
    gamma_tau: float = PANEL_GAMMA_TAU,
    gamma_t_max: float = 0.1,
    n_points: int = 101,
    threads: Optional[int] = None,
) -> List[Curve]:
    gamma_ts = np.linspace(0.0, gamma_t_max, n_points)
    configs = [FeedbackConfig.from_k(k, gamma=gamma, tau=gamma_tau / gamma, eta=e) for e in etas]
    return map_ordered(lambda cfg: coherence_curve(cfg, alpha0, gamma_ts), configs, desc="coherence", threads=threads)


# ----------------------------------------------------------------------
# Trajectories
# ----------------------------------------------------------------------


@dataclass(eq=False)
class TrajectoryEnsemble:
    table: Table
    summary: Dict = field(default_factory=dict)


def _asymptotic_allowed(cfg: FeedbackConfig, alpha0: complex) -> bool:
    return cfg.phi == 0 and abs(complex(alpha0).real) <= 1e-12 * max(1.0, abs(alpha0))


def trajectory_ensemble(
    cfg: FeedbackConfig,
    alpha0: complex,
    seeds: Sequence[int],
    gamma_dt: float = 1e-4,
    gamma_t_max: float = 0.5,
    oracle: bool = False,
    n_max: int = 30,
    threads: Optional[int] = None,
    progress: bool = False,
) -> TrajectoryEnsemble:
    """
    Per-seed C_w(t) (full and, where it applies, asymptotic) with ensemble
    statistics and an optional number-basis oracle report per seed.

    Columns: seed, gamma_t, full_re, full_im, asym_re, asym_im, w.
    Asymptotic columns are NaN when phi != 0 or Re(alpha0) != 0.
    """
    dt = gamma_dt / cfg.gamma
    t_max = gamma_t_max / cfg.gamma
    asymptotic = _asymptotic_allowed(cfg, alpha0)
    if not asymptotic:
        logger.warning("asymptotic C_w needs phi = 0 and Re(alpha0) = 0; columns left empty")

    def run(seed: int):
        path = generate_path(seed, dt, t_max)
        full = coherence_trajectory(path, alpha0, cfg, mode="full")
        asym = coherence_trajectory(path, alpha0, cfg, mode="asymptotic") if asymptotic else np.full_like(full, np.nan)
        report = compare_with_closed_form(path, alpha0, cfg, n_max) if oracle else None
        block = np.column_stack([
            np.full(len(full), seed, dtype=float), cfg.gamma * path.times(),
            full.real, full.imag, asym.real, asym.imag, path.cumulative,
        ])
        return block, full, report

    results = map_ordered(run, seeds, desc="Seeds", threads=threads, progress=progress)
    blocks = [r[0] for r in results]
    finals = np.array([r[1][-1] for r in results])
    summary = {
        "seeds": [int(s) for s in seeds],
        "gamma_t_max": gamma_t_max,
        "final_mean": [float(finals.mean().real), float(finals.mean().imag)],
        "final_modulus_variance": float(np.abs(finals).var()),
        "final_phase_variance": float(np.angle(finals).var()),
    }
    if oracle:
        reports = [r[2] for r in results]
        summary["oracle"] = [
            {
                "seed": rep.seed,
                "min_fidelity": rep.min_fidelity,
                "max_weight_error": rep.max_weight_error,
                "max_fit_residual": rep.max_fit_residual,
                "max_weight_discrepancy": rep.max_weight_discrepancy,
                "passed": rep.passed(),
            }
            for rep in reports
        ]
        summary["oracle_passed"] = all(rep.passed() for rep in reports)
    table = Table(
        columns=["seed", "gamma_t", "full_re", "full_im", "asym_re", "asym_im", "w"],
        data=np.vstack(blocks),
    )
    return TrajectoryEnsemble(table=table, summary=summary)


def contrast_summary(slices: Sequence[PdistSlice]) -> Dict[str, Dict[str, float]]:
    out: Dict[str, Dict[str, float]] = {}
    for s in slices:
        out.setdefault(s.panel, {})[f"{s.gamma_t:g}"] = s.contrast
    return out


def normalization_error(s: PdistSlice) -> float:
    """|int P dx - 1| by the trapezoid rule on the slice grid."""
    return abs(float(trapezoid(s.p, s.x)) - 1.0)

