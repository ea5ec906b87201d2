"""
Zero-delay stochastic trajectories and their number-basis oracle.

Public API
----------
Paths:        WienerPath, generate_path, refine_path
Closed form:  f_functions, ito_functionals, trajectory, coherence_trajectory,
              ensemble_coherence
Oracle:       fock_sde_oracle, coherent_fidelity, fit_coherent_amplitude,
              compare_with_closed_form
Export:       write_trajectory_csv, write_trajectory_npz
"""

from trajectories.export import load_trajectory_npz, write_trajectory_csv, write_trajectory_npz
from trajectories.fock import (
    FockSeries,
    OracleReport,
    coherent_fidelity,
    coherent_vector,
    compare_with_closed_form,
    fit_coherent_amplitude,
    fock_sde_oracle,
)
from trajectories.functionals import (
    EnsembleCoherence,
    ItoFunctionals,
    TrajectorySeries,
    TrajectoryState,
    coherence_trajectory,
    ensemble_coherence,
    f_functions,
    initial_coherence,
    ito_functionals,
    trajectory,
)
from trajectories.paths import WienerPath, generate_path, refine_path

__all__ = [
    "WienerPath",
    "generate_path",
    "refine_path",
    "f_functions",
    "ito_functionals",
    "ItoFunctionals",
    "trajectory",
    "TrajectorySeries",
    "TrajectoryState",
    "coherence_trajectory",
    "ensemble_coherence",
    "EnsembleCoherence",
    "initial_coherence",
    "fock_sde_oracle",
    "FockSeries",
    "OracleReport",
    "coherent_fidelity",
    "coherent_vector",
    "compare_with_closed_form",
    "fit_coherent_amplitude",
    "write_trajectory_csv",
    "write_trajectory_npz",
    "load_trajectory_npz",
]
