"""
Run records, parameter sweeps, CSV output and the verification suite behind the CLI.

Public API
----------
Records:   RunConfig, CheckResult, VerifyReport
Output:    write_csv, read_csv, read_header
Sweeps:    chi_family, pdist_panels, coherence_tau_family, coherence_eta_family,
           trajectory_ensemble
Checks:    CHECKS, run_checks, report_json, fourier_link_error
"""

from runs.checks import CHECKS, fourier_link_error, report_json, run_checks
from runs.output import read_csv, read_header, write_csv
from runs.schema import CheckResult, RunConfig, VerifyReport
from runs.sweeps import (
    chi_family,
    coherence_eta_family,
    coherence_tau_family,
    pdist_panels,
    trajectory_ensemble,
)

__all__ = [
    "CHECKS",
    "fourier_link_error",
    "report_json",
    "run_checks",
    "read_csv",
    "read_header",
    "write_csv",
    "CheckResult",
    "RunConfig",
    "VerifyReport",
    "chi_family",
    "coherence_eta_family",
    "coherence_tau_family",
    "pdist_panels",
    "trajectory_ensemble",
]
