from moments.correlation import (
    QuadratureMoments,
    central_moment,
    correlation,
    g_function,
    initial_second_moment,
    quadrature_moments,
    shifted_moment,
    sigma2,
    sigma2_first_order,
    sigma2_markov,
)
from moments.quadrature import adaptive_simpson

__all__ = [
    "QuadratureMoments",
    "adaptive_simpson",
    "central_moment",
    "correlation",
    "g_function",
    "initial_second_moment",
    "quadrature_moments",
    "shifted_moment",
    "sigma2",
    "sigma2_first_order",
    "sigma2_markov",
]
