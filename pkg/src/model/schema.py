"""Pydantic records for the physical parameters and initial cavity states."""

import math
from typing import Annotated, Any, Iterator, List, Literal, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    PrivateAttr,
    model_validator,
)

from model.errors import (
    InvalidDampingError,
    InvalidDelayError,
    InvalidEfficiencyError,
    InvalidStateError,
)


def _to_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex pair must have two entries, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def _from_complex(value: complex) -> List[float]:
    return [float(value.real), float(value.imag)]


# Complex numbers travel as [re, im] pairs in every JSON document.
Complex = Annotated[
    complex,
    PlainValidator(_to_complex),
    PlainSerializer(_from_complex, return_type=list),
]


class FeedbackConfig(BaseModel):
    """Physical parameter set of the cavity + delayed homodyne feedback loop.

    Angles are radians, never wrapped. ``k = g sin(theta - phi)`` is computed
    once at construction and read through :attr:`k`.
    """

    model_config = ConfigDict(frozen=True)

    gamma: float = 1.0
    g: float = 0.0
    theta: float = 0.0
    phi: float = 0.0
    tau: float = 0.0
    eta: float = 1.0

    _k: float = PrivateAttr(default=0.0)

    @model_validator(mode="after")
    def _check_ranges(self) -> "FeedbackConfig":
        if not self.gamma > 0:
            raise InvalidDampingError(f"gamma must be > 0, got {self.gamma}")
        if not self.tau >= 0:
            raise InvalidDelayError(f"tau must be >= 0, got {self.tau}")
        if not (0 < self.eta <= 1):
            raise InvalidEfficiencyError(f"eta must lie in (0, 1], got {self.eta}")
        return self

    def model_post_init(self, __context: Any) -> None:
        self._k = self.g * math.sin(self.theta - self.phi)

    @property
    def k(self) -> float:
        """Effective feedback gain g sin(theta - phi)."""
        return self._k

    @property
    def sin_delta(self) -> float:
        return math.sin(self.theta - self.phi)

    def with_(self, **changes: Any) -> "FeedbackConfig":
        """Validated copy with some fields replaced."""
        data = self.model_dump()
        data.update(changes)
        return FeedbackConfig(**data)

    @classmethod
    def from_k(
        cls,
        k: float,
        gamma: float = 1.0,
        tau: float = 0.0,
        eta: float = 1.0,
        phi: float = 0.0,
    ) -> "FeedbackConfig":
        """Parameter set realizing a requested effective gain k.

        Uses g = 1 and theta = phi + asin(k) when |k| <= 1, otherwise
        theta = phi + pi/2 and g = k.
        """
        if abs(k) <= 1:
            return cls(gamma=gamma, g=1.0, theta=phi + math.asin(k), phi=phi, tau=tau, eta=eta)
        return cls(gamma=gamma, g=k, theta=phi + math.pi / 2, phi=phi, tau=tau, eta=eta)


class Term(BaseModel):
    model_config = ConfigDict(frozen=True)

    amplitude: Complex
    coefficient: Complex


def overlap(beta: complex, alpha: complex) -> complex:
    """Coherent-state inner product <beta|alpha>."""
    beta = complex(beta)
    alpha = complex(alpha)
    return complex(
        np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + beta.conjugate() * alpha)
    )


class CoherentSuperposition(BaseModel):
    """Initial cavity state sum_i c_i |alpha_i>.

    With ``norm_mode="renormalize"`` the coefficients are rescaled at
    construction so that sum_ij c_i c_j* <alpha_j|alpha_i> = 1.
    """

    model_config = ConfigDict(frozen=True)

    terms: List[Term] = Field(default_factory=list)
    norm_mode: Literal["as-given", "renormalize"] = "as-given"

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        raw_terms = data.get("terms") or []
        if not raw_terms:
            raise InvalidStateError("a superposition needs at least one term")
        if data.get("norm_mode", "as-given") != "renormalize":
            return data

        parsed: List[Tuple[complex, complex]] = []
        for term in raw_terms:
            if isinstance(term, Term):
                parsed.append((term.amplitude, term.coefficient))
            elif isinstance(term, dict):
                parsed.append((_to_complex(term["amplitude"]), _to_complex(term["coefficient"])))
            else:
                amp, coef = term
                parsed.append((_to_complex(amp), _to_complex(coef)))

        norm = _norm(parsed)
        if not norm > 0:
            raise InvalidStateError(f"superposition has non-positive norm {norm}")
        scale = 1.0 / math.sqrt(norm)
        data = dict(data)
        data["terms"] = [{"amplitude": a, "coefficient": c * scale} for a, c in parsed]
        return data

    @classmethod
    def from_pairs(
        cls,
        pairs: List[Tuple[complex, complex]],
        norm_mode: str = "as-given",
    ) -> "CoherentSuperposition":
        return cls(
            terms=[{"amplitude": a, "coefficient": c} for a, c in pairs],
            norm_mode=norm_mode,
        )

    @property
    def amplitudes(self) -> List[complex]:
        return [t.amplitude for t in self.terms]

    @property
    def coefficients(self) -> List[complex]:
        return [t.coefficient for t in self.terms]

    def density_weights(self) -> np.ndarray:
        """Read-only matrix N[a, b] = c_a c_b*."""
        c = np.asarray(self.coefficients, dtype=complex)
        weights = np.outer(c, c.conj())
        weights.setflags(write=False)
        return weights

    def pairs(self) -> Iterator[Tuple[complex, complex, complex]]:
        """Yield (alpha, beta, N_alpha_beta) for every ordered pair of terms."""
        for a in self.terms:
            for b in self.terms:
                yield a.amplitude, b.amplitude, a.coefficient * b.coefficient.conjugate()

    def norm(self) -> float:
        return _norm([(t.amplitude, t.coefficient) for t in self.terms])


def _norm(terms: List[Tuple[complex, complex]]) -> float:
    total = 0j
    for alpha, c_a in terms:
        for beta, c_b in terms:
            total += c_a * c_b.conjugate() * overlap(beta, alpha)
    return float(total.real)


class TimeGrid(BaseModel):
    """Sample grid on [t_start, t_end] that knows where chi has kinks.

    ``knots`` holds every n*tau (n >= 1) inside the interval; quadratures
    split there.
    """

    model_config = ConfigDict(frozen=True)

    t_start: float = 0.0
    t_end: float
    n_points: int = 101
    tau: float = 0.0
    knots: List[float] = Field(default_factory=list)

    @model_validator(mode="before")
    @classmethod
    def _fill_knots(cls, data: Any) -> Any:
        if not isinstance(data, dict) or data.get("knots"):
            return data
        data = dict(data)
        data["knots"] = delay_knots(
            float(data.get("t_start", 0.0)), float(data["t_end"]), float(data.get("tau", 0.0))
        )
        return data

    @model_validator(mode="after")
    def _check(self) -> "TimeGrid":
        if self.t_end < self.t_start:
            raise ValueError("t_end must not precede t_start")
        if self.n_points < 2:
            raise ValueError("a time grid needs at least two points")
        if self.knots != sorted(self.knots):
            raise ValueError("knots must be sorted")
        return self

    @classmethod
    def uniform(
        cls, t_end: float, n_points: int = 101, tau: float = 0.0, t_start: float = 0.0
    ) -> "TimeGrid":
        return cls(t_start=t_start, t_end=t_end, n_points=n_points, tau=tau)

    def points(self, include_knots: bool = False) -> np.ndarray:
        pts = np.linspace(self.t_start, self.t_end, self.n_points)
        if include_knots and self.knots:
            pts = np.unique(np.concatenate([pts, np.asarray(self.knots)]))
        return pts

    def segments(self) -> List[Tuple[float, float]]:
        """Consecutive intervals between end points and knots."""
        bounds = [self.t_start] + [k for k in self.knots if self.t_start < k < self.t_end] + [self.t_end]
        return [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def delay_knots(t_start: float, t_end: float, tau: float, offset: float = 0.0) -> List[float]:
    """Sorted list of offset + n*tau (n >= 1) lying in [t_start, t_end]."""
    if tau <= 0 or t_end < t_start:
        return []
    knots = []
    n = max(1, int(math.ceil((t_start - offset) / tau - 1e-12)))
    while True:
        x = offset + n * tau
        if x > t_end * (1 + 1e-14) + 1e-300:
            break
        if x >= t_start:
            knots.append(x)
        n += 1
    return knots
