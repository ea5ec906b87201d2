"""
Characteristic function <D(lambda, t)> of the fed-back cavity field.

Public API
----------
Closed forms:  charfn_early, charfn_small_tau, coherence_function,
               SmallTauCoefficients, displacement_matrix_element
Exact:         charfn_exact, exact_result, hamiltonian_exponent,
               cat_coherence_exact, cat_coherence_curve, CharFnSolver
"""

from charfn.closed_form import (
    SmallTauCoefficients,
    charfn_early,
    charfn_small_tau,
    coherence_function,
    displacement_matrix_element,
    log_charfn_early,
    log_charfn_small_tau,
    log_coherence_function,
    quadrature_weight,
)
from charfn.exact import (
    CharFnKernels,
    CharFnResult,
    CharFnSolver,
    cat_coherence_curve,
    cat_coherence_exact,
    charfn_exact,
    exact_result,
    get_solver,
    hamiltonian_exponent,
    reset_solvers,
)
from charfn.grid import GridPlan, KernelTable, plan_grid

__all__ = [
    "SmallTauCoefficients",
    "charfn_early",
    "charfn_small_tau",
    "coherence_function",
    "displacement_matrix_element",
    "log_charfn_early",
    "log_charfn_small_tau",
    "log_coherence_function",
    "quadrature_weight",
    "CharFnKernels",
    "CharFnResult",
    "CharFnSolver",
    "cat_coherence_curve",
    "cat_coherence_exact",
    "charfn_exact",
    "exact_result",
    "get_solver",
    "hamiltonian_exponent",
    "reset_solvers",
    "GridPlan",
    "KernelTable",
    "plan_grid",
]
