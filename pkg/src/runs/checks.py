"""
Cross-module verification suite behind ``delayfb verify``.

Each check is a function returning a CheckResult; a check that raises is
reported as failed with the exception text. The report is deterministic
JSON (sorted keys, no timestamps).
"""

import cmath
import json
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from charfn.closed_form import charfn_early, charfn_small_tau, displacement_matrix_element
from charfn.exact import charfn_exact
from dde.oracle import dde_oracle
from dde.series import get_evaluator
from distribution.marginal import decoherence_time, fringe_contrast, marginal_pdf_grid
from model.schema import FeedbackConfig, overlap
from model.states import cat_state
from moments.correlation import sigma2, sigma2_first_order, sigma2_markov
from runs.schema import CheckResult, VerifyReport
from runs.sweeps import chi_family, coherence_eta_family, coherence_tau_family, pdist_configs
from trajectories.fock import compare_with_closed_form
from trajectories.functionals import coherence_trajectory
from trajectories.paths import generate_path
from utils.logger import logger
from utils.parallel import map_ordered

CheckFn = Callable[[], CheckResult]

ORDER_BAND = (3.5, 4.5)


def _result(name: str, passed: bool, detail: str, metric: Optional[float] = None) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail, metric=None if metric is None else float(metric))


def check_chi_oracle() -> CheckResult:
    """Delay series against RK4 method of steps, dx = 1e-3, gamma t in [0, 10]."""
    worst = 0.0
    for k in (-0.45, 0.45, 1.0):
        for gamma_tau in (0.5, 1.0, 2.5, 5.0):
            cfg = FeedbackConfig.from_k(k, tau=gamma_tau)
            sampled = dde_oracle(1.0, k, gamma_tau / 2, 5.0, 1e-3)
            series = get_evaluator(cfg).values(sampled.times(cfg.gamma))
            worst = max(worst, float(np.max(np.abs(series - sampled.z))))
    return _result("chi_oracle", worst <= 1e-8, f"max |series - RK4| = {worst:.3e}", worst)


def check_chi_family() -> CheckResult:
    curves = chi_family()
    markov = curves[0]
    err = float(np.max(np.abs(markov.y - np.exp(-0.05 * markov.x))))
    at8 = [get_evaluator(FeedbackConfig.from_k(0.45, tau=gt)).chi(8.0) for gt in (5.0, 2.5, 1.0, 0.5)]
    ordered = all(a < b for a, b in zip(at8, at8[1:]))
    return _result(
        "chi_family",
        err <= 1e-12 and ordered and len(curves) == 6,
        f"tau=0 curve error {err:.3e}; chi(8) for gamma_tau 5, 2.5, 1, 0.5: {', '.join(f'{v:.6f}' for v in at8)}",
        err,
    )


def check_variance() -> CheckResult:
    markov_cfg = FeedbackConfig.from_k(1.0)
    markov_err = max(abs(sigma2(t, markov_cfg) - sigma2_markov(t, markov_cfg)) for t in (0.1, 0.25, 0.5))

    def residual(gamma_tau: float) -> float:
        cfg = FeedbackConfig.from_k(1.0, tau=gamma_tau)
        return max(abs(sigma2(t, cfg) - sigma2_first_order(t, cfg)) for t in (0.1, 0.2, 0.3, 0.4, 0.5))

    ratio = residual(0.02) / residual(0.01)
    passed = markov_err <= 1e-10 and ORDER_BAND[0] <= ratio <= ORDER_BAND[1]
    return _result("variance", passed, f"tau=0 error {markov_err:.3e}; first-order ratio {ratio:.4f}", ratio)


def check_decoherence() -> CheckResult:
    t_dec = decoherence_time(FeedbackConfig(), 5.0)
    panels = pdist_configs()
    c = {name: fringe_contrast(0.1, 5j, cfg) for name, cfg in panels.items()}
    ordered = c["a"] < 0.05 < 0.5 < c["b"] and c["a"] < c["c"] <= c["b"] and c["d"] < c["c"]
    detail = f"t_dec={t_dec!r}; contrast " + ", ".join(f"{k}={v:.4f}" for k, v in sorted(c.items()))
    return _result("decoherence", t_dec == 0.02 and ordered, detail, t_dec)


def fourier_link_error(cfg: FeedbackConfig, gamma_t: float, alpha0: complex = 5j, n_k: int = 61) -> float:
    """max_k |int P(x) e^{2ikx} dx - sum_ab N_ab <D(i k e^{i phi})>_{ba}|."""
    t = gamma_t / cfg.gamma
    state = cat_state(alpha0)
    ks = np.linspace(-3.0, 3.0, n_k)
    xs = np.linspace(-8.0, 8.0, 4001)
    p = marginal_pdf_grid(xs, t, state, cfg)
    numeric = trapezoid(p[None, :] * np.exp(2j * ks[:, None] * xs[None, :]), xs, axis=1)

    phase = cmath.exp(1j * cfg.phi)
    analytic = np.zeros(n_k, dtype=complex)
    for i, k in enumerate(ks):
        lam = 1j * k * phase
        analytic[i] = sum(w * charfn_exact(lam, t, a, b, cfg, max_step=1e-3) for a, b, w in state.pairs())
    return float(np.max(np.abs(numeric - analytic)))


def check_fourier_link() -> CheckResult:
    worst = 0.0
    for cfg in (FeedbackConfig.from_k(1.0), FeedbackConfig.from_k(1.0, tau=0.01)):
        for gamma_t in (0.02, 0.1):
            worst = max(worst, fourier_link_error(cfg, gamma_t))
    return _result("fourier_link", worst <= 1e-6, f"max |FT[P] - charfn| = {worst:.3e}", worst)


def check_charfn_normalization() -> CheckResult:
    alpha, beta = 0.3 + 0.2j, -0.1 + 0.4j
    configs = [
        FeedbackConfig.from_k(1.0, tau=0.01),
        FeedbackConfig.from_k(0.45, tau=0.5),
        FeedbackConfig(g=0.7, theta=0.3, phi=0.2, tau=0.2, eta=0.8),
    ]
    norm_err = 0.0
    for cfg in configs:
        for t in (0.05, 0.3, 0.7):
            norm_err = max(norm_err, abs(charfn_exact(0j, t, alpha, beta, cfg) - overlap(beta, alpha)))

    damped = FeedbackConfig(tau=0.3)
    damp_err = 0.0
    for lam in (0.5j, 0.8 - 0.3j):
        for t in (0.2, 0.9):
            e = math.exp(-0.5 * t)
            expected = displacement_matrix_element(lam * e, alpha, beta) * math.exp(-0.5 * abs(lam) ** 2 * (1 - e * e))
            damp_err = max(damp_err, abs(charfn_exact(lam, t, alpha, beta, damped) - expected))
    passed = norm_err < 1e-10 and damp_err < 1e-8
    return _result("charfn_normalization", passed, f"lambda=0 error {norm_err:.3e}; g=0 error {damp_err:.3e}", norm_err)


def check_small_tau() -> CheckResult:
    lam, alpha, beta, t = 2j, 1j, 1j, 0.1

    def residual(gamma_tau: float) -> float:
        cfg = FeedbackConfig.from_k(1.0, tau=gamma_tau)
        return abs(charfn_exact(lam, t, alpha, beta, cfg) - charfn_small_tau(lam, t, alpha, beta, cfg))

    ratio = residual(0.005) / residual(0.0025)
    cfg = FeedbackConfig.from_k(1.0, tau=0.005)
    edge = abs(charfn_early(lam, 0.01, alpha, beta, cfg) - charfn_exact(lam, 0.01, alpha, beta, cfg))
    passed = ORDER_BAND[0] <= ratio <= ORDER_BAND[1] and edge < 1e-8
    return _result("small_tau", passed, f"residual ratio {ratio:.4f}; continuity at 2 tau {edge:.3e}", ratio)


def check_coherence_families() -> CheckResult:
    taus = coherence_tau_family()
    etas = coherence_eta_family()
    starts = max(abs(c.y[0] - 1.0) for c in taus + etas)

    x = taus[0].x
    late = x >= 0.05
    tau_order = all(np.all(lo.y[late] < hi.y[late]) for lo, hi in zip(taus[:3], taus[1:4]))
    idx = int(np.argmin(np.abs(etas[0].x - 0.05)))
    eta_values = [c.y[idx] for c in etas]
    eta_order = all(a < b for a, b in zip(eta_values, eta_values[1:]))

    reference = taus[-1]
    tau01 = taus[1]
    window = (x > 0.01 + 1e-12) & (x <= 0.1 + 1e-12)
    retarded = bool(np.all(tau01.y[window] > reference.y[window]))

    passed = starts < 1e-12 and tau_order and eta_order and retarded
    detail = f"start error {starts:.1e}; tau order {tau_order}; eta order {eta_order}; above g=0 {retarded}"
    return _result("coherence_families", passed, detail, starts)


def check_trajectory_oracle(seeds: Sequence[int] = tuple(range(10))) -> CheckResult:
    cfg = FeedbackConfig(g=1.0, theta=math.pi / 2)
    reports = map_ordered(
        lambda s: compare_with_closed_form(generate_path(s, 1e-4, 0.5), 1.0, cfg, n_max=30), seeds, desc="oracle"
    )
    min_fid = min(r.min_fidelity for r in reports)
    max_w = max(r.max_weight_error for r in reports)

    path = generate_path(0, 1e-4, 0.01)
    moduli = [
        np.abs(coherence_trajectory(path, 5j, cfg.with_(theta=theta), mode="asymptotic"))
        for theta in (0.0, math.pi / 4, math.pi / 2, 1.0)
    ]
    spread = max(float(np.max(np.abs(m - moduli[0]))) for m in moduli)
    passed = all(r.passed() for r in reports) and spread <= 1e-14
    return _result(
        "trajectory_oracle",
        passed,
        f"min fidelity {min_fid:.8f}; max weight error {max_w:.3e}; theta spread {spread:.1e}",
        1.0 - min_fid,
    )


CHECKS: Dict[str, CheckFn] = {
    "chi_oracle": check_chi_oracle,
    "chi_family": check_chi_family,
    "variance": check_variance,
    "decoherence": check_decoherence,
    "fourier_link": check_fourier_link,
    "charfn_normalization": check_charfn_normalization,
    "small_tau": check_small_tau,
    "coherence_families": check_coherence_families,
    "trajectory_oracle": check_trajectory_oracle,
}


def _run_one(name: str) -> CheckResult:
    try:
        result = CHECKS[name]()
    except Exception as e:
        logger.error(f"check {name} raised: {e}")
        return _result(name, False, f"{type(e).__name__}: {e}")
    logger.info(f"check {name}: {'PASS' if result.passed else 'FAIL'} ({result.detail})")
    return result


def run_checks(names: Optional[List[str]] = None, threads: Optional[int] = None, progress: bool = False) -> VerifyReport:
    selected = sorted(names or CHECKS.keys())
    unknown = [n for n in selected if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    results = map_ordered(_run_one, selected, desc="Checks", threads=threads, progress=progress)
    return VerifyReport(passed=all(r.passed for r in results), checks=results)


def report_json(report: VerifyReport) -> str:
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2)
