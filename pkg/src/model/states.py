"""Constructors for the initial cavity states used throughout the package."""

import math

from model.schema import CoherentSuperposition, overlap


def cat_normalization(alpha0: complex) -> float:
    """Per-term coefficient of the normalized even cat N(|a0> + |-a0>).

    N = [2 (1 + exp(-2|a0|^2))]^(-1/2). The frequently quoted
    (1 + exp(-2|a0|^2))^(-1/2) normalizes the 1/sqrt(2)-weighted pair.
    """
    return 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-2.0 * abs(alpha0) ** 2)))


def cat_state(alpha0: complex) -> CoherentSuperposition:
    """Even Schroedinger cat N(|alpha0> + |-alpha0>), normalized."""
    alpha0 = complex(alpha0)
    n = cat_normalization(alpha0)
    return CoherentSuperposition.from_pairs([(alpha0, n), (-alpha0, n)])


def coherent(alpha: complex) -> CoherentSuperposition:
    return CoherentSuperposition.from_pairs([(complex(alpha), 1.0)])


def vacuum() -> CoherentSuperposition:
    return coherent(0.0)


__all__ = ["cat_normalization", "cat_state", "coherent", "vacuum", "overlap"]
