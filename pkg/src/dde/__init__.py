"""
Delay-series solution chi(t), commutator kernels and the method-of-steps oracle.

Public API
----------
Series:   ChiEvaluator, chi, chi_derivative, chi_first_order, excess_ratio,
          mean_quadrature, quadrature_matrix_element, get_evaluator
Kernels:  KernelSet, kernels
Oracle:   dde_oracle, SampledFunction
"""

from dde.kernels import KernelSet, kernels
from dde.oracle import SampledFunction, dde_oracle
from dde.series import (
    ChiEvaluator,
    Derivative,
    chi,
    chi_derivative,
    chi_first_order,
    excess_ratio,
    get_evaluator,
    mean_quadrature,
    quadrature_matrix_element,
    reset_evaluators,
)

__all__ = [
    "ChiEvaluator",
    "Derivative",
    "chi",
    "chi_derivative",
    "chi_first_order",
    "excess_ratio",
    "get_evaluator",
    "reset_evaluators",
    "mean_quadrature",
    "quadrature_matrix_element",
    "KernelSet",
    "kernels",
    "SampledFunction",
    "dde_oracle",
]
