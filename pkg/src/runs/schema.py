"""Pydantic records describing one CLI run and the results of verification."""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from model.schema import Complex, FeedbackConfig

Subcommand = Literal["chi", "pdist", "coherence", "trajectories", "verify", "show-config"]


class RunConfig(BaseModel):
    """Everything a subcommand needs to reproduce its output.

    Times are in units of 1/gamma (columns are labelled gamma_t).
    """

    model_config = ConfigDict(frozen=True)

    subcommand: Subcommand
    feedback: FeedbackConfig = Field(default_factory=FeedbackConfig)
    alpha0: Complex = 5j

    # time grid, gamma * t
    t_max: float = 10.0
    n_points: int = 201
    t_list: List[float] = Field(default_factory=list)

    # quadrature grid
    x_min: float = -3.0
    x_max: float = 3.0
    n_x: int = 241

    # trajectories
    seeds: List[int] = Field(default_factory=list)
    dt: float = 1e-4
    oracle: bool = False
    n_max: int = 30

    # False when the feedback parameters were given explicitly: one curve instead of the default families
    family: bool = True

    # verify: subset of check names, empty = all
    checks: List[str] = Field(default_factory=list)

    output: Optional[str] = None
    threads: int = 1


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    detail: str = ""
    metric: Optional[float] = None


class VerifyReport(BaseModel):
    passed: bool
    checks: List[CheckResult] = Field(default_factory=list)
