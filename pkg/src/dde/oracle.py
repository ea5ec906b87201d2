"""
Method-of-steps solver for the dimensionless delay equation

    dZ/dxi = -Z(xi) + 2k Z(xi - y) Theta(xi - y),   Z(0) = z0,

used as an independent check of the delay series. With xi = gamma t / 2 and
y = gamma tau / 2, Z(xi) / z0 equals chi(t).
"""

import math
from dataclasses import dataclass

import numpy as np

from model.errors import StepTooLargeError
from utils.logger import logger

INTERPOLATIONS = ("hermite", "linear")


@dataclass(frozen=True)
class SampledFunction:
    """Solution samples on the uniform grid xi_j = j * dx."""

    xi: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    dx: float
    y: float

    def __call__(self, xi):
        return np.interp(xi, self.xi, self.z)

    def times(self, gamma: float) -> np.ndarray:
        """Physical times t = 2 xi / gamma of the samples."""
        return 2.0 * self.xi / gamma


def dde_oracle(
    z0: float,
    k: float,
    y: float,
    xi_max: float,
    dx: float,
    interpolation: str = "hermite",
) -> SampledFunction:
    """
    Integrate the delay equation with classical RK4 on steps aligned to y.

    History on [0, y] is pure decay. The step is shrunk to y / ceil(y / dx) so
    that every kink m*y falls on the grid. The delayed value at a stage
    midpoint comes from cubic Hermite interpolation of the stored samples and
    slopes ("hermite") or from their average ("linear").

    Raises:
        StepTooLargeError: dx > y / 4 for y > 0.
    """
    if not dx > 0:
        raise ValueError(f"dx must be > 0, got {dx}")
    if not y >= 0:
        raise ValueError(f"y must be >= 0, got {y}")
    if not xi_max > 0:
        raise ValueError(f"xi_max must be > 0, got {xi_max}")
    if interpolation not in INTERPOLATIONS:
        raise ValueError(
            f"Unknown interpolation: {interpolation}. Must be one of: {', '.join(INTERPOLATIONS)}"
        )

    if y > 0:
        if dx > y / 4:
            raise StepTooLargeError(f"dx={dx} exceeds y/4={y / 4}")
        m = int(math.ceil(y / dx - 1e-9))
        step = y / m
        if step != dx:
            logger.debug(f"dde_oracle: step adjusted from {dx} to {step} (y={y}, m={m})")
    else:
        m = 0
        step = dx

    n_steps = int(math.ceil(xi_max / step - 1e-9))
    xi = step * np.arange(n_steps + 1)
    z = np.zeros(n_steps + 1)
    dz = np.zeros(n_steps + 1)
    z[0] = z0

    gain = 2.0 * k

    if m == 0:
        rate = gain - 1.0
        for j in range(n_steps):
            k1 = rate * z[j]
            k2 = rate * (z[j] + 0.5 * step * k1)
            k3 = rate * (z[j] + 0.5 * step * k2)
            k4 = rate * (z[j] + step * k3)
            z[j + 1] = z[j] + step * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        dz[:] = rate * z
        return SampledFunction(xi=xi, z=z, dz=dz, dx=step, y=y)

    # Right-sided slopes; the slope entering interval [m-1, m] from the left
    # is the unfed one, kept separately for the Hermite interpolant.
    dz[0] = -z[0]
    left_dz_m = None

    for j in range(n_steps):
        if j < m:
            d0 = dmid = d1 = 0.0
        else:
            i = j - m
            d0 = z[i]
            d1 = z[i + 1]
            if interpolation == "hermite":
                slope_end = left_dz_m if (i + 1 == m and left_dz_m is not None) else dz[i + 1]
                dmid = 0.5 * (d0 + d1) + step * (dz[i] - slope_end) / 8.0
            else:
                dmid = 0.5 * (d0 + d1)

        k1 = -z[j] + gain * d0
        k2 = -(z[j] + 0.5 * step * k1) + gain * dmid
        k3 = -(z[j] + 0.5 * step * k2) + gain * dmid
        k4 = -(z[j] + step * k3) + gain * d1
        z[j + 1] = z[j] + step * (k1 + 2 * k2 + 2 * k3 + k4) / 6

        nxt = j + 1
        if nxt >= m:
            dz[nxt] = -z[nxt] + gain * z[nxt - m]
        else:
            dz[nxt] = -z[nxt]
        if nxt == m:
            left_dz_m = -z[nxt]

    return SampledFunction(xi=xi, z=z, dz=dz, dx=step, y=y)
