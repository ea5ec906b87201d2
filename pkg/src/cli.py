import sys
import os
import argparse
import json
import math
from typing import Any, Dict, List, Optional

import numpy as np

# Add src to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config import config
from model.errors import DelayFeedbackError
from model.schema import FeedbackConfig
from model.serialization import load_model
from runs.checks import report_json, run_checks
from runs.output import write_csv
from runs.schema import RunConfig
from runs.sweeps import (
    DEFAULT_K,
    chi_curve,
    chi_family,
    coherence_curve,
    coherence_eta_family,
    coherence_tau_family,
    contrast_summary,
    curves_table,
    normalization_error,
    pdist_panels,
    pdist_table,
    trajectory_ensemble,
)
from utils.logger import logger

FEEDBACK_FLAGS = ("gamma", "g", "theta", "phi", "tau", "eta")
GRID_FLAGS = ("t_max", "n_points", "x_min", "x_max", "n_x", "dt", "n_max")

# Per-subcommand defaults that differ from the RunConfig field defaults
SUBCOMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "chi": {"t_max": 10.0, "n_points": 201},
    "pdist": {"t_list": [0.0, 0.02, 0.05, 0.1]},
    "coherence": {"t_max": 0.1, "n_points": 101},
    "trajectories": {"t_max": 0.5, "alpha0": 1j, "seeds": list(range(10))},
    "verify": {},
    "show-config": {},
}

# Subcommands that write a CSV by default
CSV_COMMANDS = ("chi", "pdist", "coherence", "trajectories")


def parse_seeds(text: str) -> List[int]:
    """'0..9', '3-5' or '1,4,7' (mixable: '0..2,8')."""
    seeds: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        for sep in ("..", "-"):
            if sep in part:
                lo, hi = part.split(sep, 1)
                seeds.extend(range(int(lo), int(hi) + 1))
                break
        else:
            seeds.append(int(part))
    if not seeds or any(s < 0 for s in seeds):
        raise ValueError(f"seeds must be a non-empty list of non-negative integers, got {text!r}")
    return seeds


def base_feedback(command: str) -> FeedbackConfig:
    """Parameter set a subcommand starts from before flags are applied."""
    if command == "chi":
        return FeedbackConfig.from_k(DEFAULT_K)
    if command == "trajectories":
        return FeedbackConfig(g=1.0, theta=math.pi / 2)
    return FeedbackConfig()


def _load_config_file(path: str) -> Dict[str, Any]:
    """Fields of a RunConfig file, or {'feedback': ...} for a bare FeedbackConfig file."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"config file {path} does not exist")
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    if "subcommand" in raw:
        loaded = load_model(RunConfig, path)
        if loaded is None:
            raise ValueError(f"{path} is not a valid run config")
        return {name: getattr(loaded, name) for name in RunConfig.model_fields if name != "subcommand"}
    loaded = load_model(FeedbackConfig, path)
    if loaded is None:
        raise ValueError(f"{path} is not a valid feedback config")
    return {"feedback": loaded, "family": False}


def resolve_run(args: argparse.Namespace) -> RunConfig:
    """
    Merge, in increasing priority: subcommand defaults, the --config JSON file
    (a full RunConfig or just a FeedbackConfig) and explicit flags.

    Explicit feedback parameters switch the default families off: the run
    then produces a single curve for the resolved FeedbackConfig.
    """
    data: Dict[str, Any] = dict(SUBCOMMAND_DEFAULTS[args.command])
    feedback = base_feedback(args.command).model_dump()

    if args.config:
        data.update(_load_config_file(args.config))
        feedback = data.pop("feedback").model_dump()

    overrides = {name: getattr(args, name) for name in FEEDBACK_FLAGS if getattr(args, name) is not None}
    if overrides or args.k is not None:
        feedback.update(overrides)
        if args.k is not None:
            k_cfg = FeedbackConfig.from_k(
                args.k, gamma=feedback["gamma"], tau=feedback["tau"], eta=feedback["eta"], phi=feedback["phi"]
            )
            feedback.update(g=k_cfg.g, theta=k_cfg.theta)
        data["family"] = False
    data["feedback"] = FeedbackConfig(**feedback)

    if args.alpha0_re is not None or args.alpha0_im is not None:
        current = complex(data.get("alpha0", 5j))
        re = current.real if args.alpha0_re is None else args.alpha0_re
        im = current.imag if args.alpha0_im is None else args.alpha0_im
        data["alpha0"] = complex(re, im)

    for name in GRID_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    if getattr(args, "t_list", None):
        data["t_list"] = [float(v) for v in args.t_list.split(",")]
    if getattr(args, "seeds", None):
        data["seeds"] = parse_seeds(args.seeds)
    if getattr(args, "oracle", False):
        data["oracle"] = True
    if getattr(args, "checks", None):
        data["checks"] = [c.strip() for c in args.checks.split(",") if c.strip()]

    data["threads"] = args.threads if args.threads is not None else data.get("threads", config.worker_count)
    if args.output:
        data["output"] = args.output
    elif not data.get("output") and args.command in CSV_COMMANDS:
        data["output"] = os.path.join(config.output_dir, f"{args.command}.csv")

    return RunConfig(subcommand=args.command, **data)


def _time_grid(run: RunConfig) -> np.ndarray:
    return np.linspace(0.0, run.t_max, run.n_points)


def cmd_chi(run: RunConfig) -> int:
    """Columns curve, k, gamma_tau, g, gamma_t, chi."""
    if run.family:
        curves = chi_family(
            gamma=run.feedback.gamma, gamma_t_max=run.t_max, n_points=run.n_points, threads=run.threads
        )
    else:
        curves = [chi_curve(run.feedback, _time_grid(run))]
    table = curves_table(curves, ["k", "gamma_tau", "g"], "gamma_t", "chi")
    write_csv(run.output, run, table.columns, table.rows())
    for curve in curves:
        print(f"  {curve.label}: chi(gamma_t={curve.x[-1]:g}) = {curve.y[-1]:.6f}")
    print(f"Wrote {len(curves)} curves to {run.output}")
    return 0


def cmd_pdist(run: RunConfig) -> int:
    """Columns panel, gamma_t, x, p."""
    xs = np.linspace(run.x_min, run.x_max, run.n_x)
    configs = None if run.family else {"custom": run.feedback}
    slices = pdist_panels(
        alpha0=run.alpha0, gamma=run.feedback.gamma, gamma_ts=run.t_list, xs=xs, configs=configs,
        threads=run.threads,
    )
    table = pdist_table(slices)
    write_csv(run.output, run, table.columns, table.rows())

    print("Fringe contrast (P / envelope over |x| <= 1):")
    for panel, by_time in contrast_summary(slices).items():
        cells = ", ".join(f"gamma_t={t}: {c:.4f}" for t, c in by_time.items())
        print(f"  {panel}: {cells}")
    worst = max(normalization_error(s) for s in slices)
    print(f"Max |int P dx - 1| on the x grid: {worst:.2e}")
    print(f"Wrote {len(slices)} slices to {run.output}")
    return 0


def cmd_coherence(run: RunConfig) -> int:
    """Columns curve, gamma_tau, eta, g, k, gamma_t, coherence (= 2 <D(2 a0, t)>)."""
    if run.family:
        common = dict(alpha0=run.alpha0, gamma=run.feedback.gamma, gamma_t_max=run.t_max,
                      n_points=run.n_points, threads=run.threads)
        curves = coherence_tau_family(**common) + coherence_eta_family(**common)
    else:
        curves = [coherence_curve(run.feedback, run.alpha0, _time_grid(run))]
    table = curves_table(curves, ["gamma_tau", "eta", "g", "k"], "gamma_t", "coherence")
    write_csv(run.output, run, table.columns, table.rows())
    for curve in curves:
        print(f"  {curve.label}: {curve.y[-1]:.6f} at gamma_t={curve.x[-1]:g}")
    print(f"Wrote {len(curves)} curves to {run.output}")
    return 0


def summary_path(output: str) -> str:
    return os.path.splitext(output)[0] + "_summary.json"


def cmd_trajectories(run: RunConfig) -> int:
    """Columns seed, gamma_t, full_re, full_im, asym_re, asym_im, w; plus a summary JSON."""
    ensemble = trajectory_ensemble(
        run.feedback,
        run.alpha0,
        run.seeds,
        gamma_dt=run.dt,
        gamma_t_max=run.t_max,
        oracle=run.oracle,
        n_max=run.n_max,
        threads=run.threads,
        progress=True,
    )
    write_csv(run.output, run, ensemble.table.columns, ensemble.table.rows())

    path = summary_path(run.output)
    document = {"run": run.model_dump(mode="json"), **ensemble.summary}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, sort_keys=True)
    logger.info(f"Wrote trajectory summary to {path}")

    summary = ensemble.summary
    mean = complex(*summary["final_mean"])
    print(f"Seeds: {len(summary['seeds'])}, final mean C_w = {mean.real:.6f}{mean.imag:+.6f}i")
    print(f"  modulus variance {summary['final_modulus_variance']:.3e}, "
          f"phase variance {summary['final_phase_variance']:.3e}")
    if run.oracle:
        status = "PASS" if summary["oracle_passed"] else "FAIL"
        worst = min(r["min_fidelity"] for r in summary["oracle"])
        print(f"  number-basis oracle: {status} (min fidelity {worst:.8f})")
    print(f"Wrote {run.output} and {path}")
    return 0


def cmd_verify(run: RunConfig) -> int:
    """Prints the JSON report (and writes it with --output); exit code 1 when a check fails."""
    report = run_checks(run.checks or None, threads=run.threads, progress=True)
    text = report_json(report)
    print(text)
    if run.output:
        os.makedirs(os.path.dirname(os.path.abspath(run.output)), exist_ok=True)
        with open(run.output, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        logger.info(f"Wrote verification report to {run.output}")
    return 0 if report.passed else 1


def cmd_show_config(run: RunConfig) -> int:
    print(json.dumps(run.model_dump(mode="json"), indent=2, sort_keys=True))
    return 0


COMMANDS = {
    "chi": cmd_chi,
    "pdist": cmd_pdist,
    "coherence": cmd_coherence,
    "trajectories": cmd_trajectories,
    "verify": cmd_verify,
    "show-config": cmd_show_config,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("feedback parameters")
    group.add_argument("--gamma", type=float, default=None, help="Cavity damping rate (default: 1)")
    group.add_argument("--g", type=float, default=None, help="Feedback gain")
    group.add_argument("--theta", type=float, default=None, help="Phase of the fed-back drive (rad)")
    group.add_argument("--phi", type=float, default=None, help="Measured quadrature phase (rad)")
    group.add_argument("--tau", type=float, default=None, help="Loop delay")
    group.add_argument("--eta", type=float, default=None, help="Detection efficiency in (0, 1]")
    group.add_argument("--k", type=float, default=None,
                       help="Effective gain g sin(theta - phi); sets g and theta")
    parser.add_argument("--alpha0-re", type=float, default=None, help="Real part of the cat amplitude")
    parser.add_argument("--alpha0-im", type=float, default=None, help="Imaginary part of the cat amplitude")
    parser.add_argument("--config", type=str, default=None,
                        help="JSON file with a RunConfig or a FeedbackConfig")
    parser.add_argument("--threads", type=int, default=None,
                        help="Worker threads (default: DELAYFB_THREADS)")
    parser.add_argument("--output", "-o", type=str, default=None,
                        help="Output file (default: DELAYFB_OUTPUT_DIR/<subcommand>.csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Cavity under delayed homodyne feedback")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    chi_parser = subparsers.add_parser("chi", help="Normalized quadrature mean chi(t)")
    _add_common(chi_parser)
    chi_parser.add_argument("--t-max", type=float, default=None, help="Largest gamma*t (default: 10)")
    chi_parser.add_argument("--n-points", type=int, default=None, help="Time samples (default: 201)")

    pdist_parser = subparsers.add_parser("pdist", help="Marginal distribution P(x, t) of the cat")
    _add_common(pdist_parser)
    pdist_parser.add_argument("--t-list", type=str, default=None,
                              help="Comma separated gamma*t values (default: 0,0.02,0.05,0.1)")
    pdist_parser.add_argument("--x-min", type=float, default=None, help="Default: -3")
    pdist_parser.add_argument("--x-max", type=float, default=None, help="Default: 3")
    pdist_parser.add_argument("--n-x", type=int, default=None, help="Default: 241")

    coherence_parser = subparsers.add_parser("coherence", help="Coherence curves 2 <D(2 a0, t)>")
    _add_common(coherence_parser)
    coherence_parser.add_argument("--t-max", type=float, default=None, help="Largest gamma*t (default: 0.1)")
    coherence_parser.add_argument("--n-points", type=int, default=None, help="Time samples (default: 101)")

    traj_parser = subparsers.add_parser("trajectories", help="Zero-delay trajectories C_w(t)")
    _add_common(traj_parser)
    traj_parser.add_argument("--seeds", type=str, default=None, help="e.g. 0..9 or 1,4,7 (default: 0..9)")
    traj_parser.add_argument("--t-max", type=float, default=None, help="Largest gamma*t (default: 0.5)")
    traj_parser.add_argument("--dt", type=float, default=None, help="gamma*dt (default: 1e-4)")
    traj_parser.add_argument("--oracle", action="store_true", help="Compare every seed with the Fock-basis SDE")
    traj_parser.add_argument("--n-max", type=int, default=None, help="Fock truncation (default: 30)")

    verify_parser = subparsers.add_parser("verify", help="Run the cross-check suite, print a JSON report")
    _add_common(verify_parser)
    verify_parser.add_argument("--checks", type=str, default=None, help="Comma separated subset of checks")

    show_parser = subparsers.add_parser("show-config", help="Print the resolved run config")
    _add_common(show_parser)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 0

    try:
        config.validate_threads()
        config.validate_quadrature()
        config.validate_log_level()
        run = resolve_run(args)
        return COMMANDS[args.command](run)
    except (DelayFeedbackError, ValueError, OSError, KeyError) as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        print(f"Error ({args.command}): {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
