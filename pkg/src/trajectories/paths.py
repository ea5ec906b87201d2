"""
Reproducible Wiener paths.

Increments come from numpy's Philox counter-based bit generator keyed by
(seed, level): level 0 draws the base path, level l + 1 draws the bridge
midpoints that refine a level-l path to half its step. Step i of a level
consumes the i-th standard normal of that level's stream
(``Generator.standard_normal``), so a path is bit-identical for the same
(seed, dt, n_steps) and numpy release.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from model.errors import DomainError

_LEVEL_BITS = 64


def _generator(seed: int, level: int) -> np.random.Generator:
    key = (int(seed) << _LEVEL_BITS) | int(level)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class WienerPath:
    seed: int
    dt: float
    n_steps: int
    increments: np.ndarray
    level: int = 0
    cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        increments = np.asarray(self.increments, dtype=float)
        if increments.shape != (self.n_steps,):
            raise DomainError(f"expected {self.n_steps} increments, got shape {increments.shape}")
        cumulative = np.concatenate(([0.0], np.cumsum(increments)))
        increments.setflags(write=False)
        cumulative.setflags(write=False)
        object.__setattr__(self, "increments", increments)
        object.__setattr__(self, "cumulative", cumulative)

    @property
    def t_max(self) -> float:
        return self.n_steps * self.dt

    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)

    @classmethod
    def zero(cls, dt: float, n_steps: int) -> "WienerPath":
        """Path with every increment 0 (the noiseless reference)."""
        return cls(seed=-1, dt=dt, n_steps=n_steps, increments=np.zeros(n_steps))

    @classmethod
    def from_increments(cls, increments, dt: float, seed: int = -1) -> "WienerPath":
        increments = np.asarray(increments, dtype=float)
        return cls(seed=seed, dt=dt, n_steps=len(increments), increments=increments)


def generate_path(seed: int, dt: float, t_max: float) -> WienerPath:
    """Gaussian increments N(0, dt) on ceil(t_max / dt) steps."""
    if seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed}")
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    n_steps = max(1, int(math.ceil(t_max / dt - 1e-9)))
    increments = math.sqrt(dt) * _generator(seed, 0).standard_normal(n_steps)
    return WienerPath(seed=seed, dt=dt, n_steps=n_steps, increments=increments)


def refine_path(path: WienerPath) -> WienerPath:
    """
    Halve the step by Brownian-bridge subdivision.

    Each coarse increment dW splits into dW/2 + z sqrt(dt)/2 and
    dW/2 - z sqrt(dt)/2, so the refined path passes through every coarse node.
    """
    if path.seed < 0:
        raise DomainError("only seeded paths can be refined")
    z = _generator(path.seed, path.level + 1).standard_normal(path.n_steps)
    half = 0.5 * path.increments
    spread = 0.5 * math.sqrt(path.dt) * z
    increments = np.empty(2 * path.n_steps)
    increments[0::2] = half + spread
    increments[1::2] = half - spread
    return WienerPath(
        seed=path.seed,
        dt=path.dt / 2,
        n_steps=2 * path.n_steps,
        increments=increments,
        level=path.level + 1,
    )
