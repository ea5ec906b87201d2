"""Exception hierarchy shared by every delayfb module."""


class DelayFeedbackError(Exception):
    """Base class of all delayfb errors."""
    pass


class ConfigError(DelayFeedbackError):
    """Invalid physical parameter set.

    Not a ValueError, so it propagates out of pydantic validators unwrapped.
    """
    pass


class InvalidDampingError(ConfigError):
    """Cavity damping rate gamma must be strictly positive."""
    pass


class InvalidDelayError(ConfigError):
    """Feedback delay tau must be non-negative."""
    pass


class InvalidEfficiencyError(ConfigError):
    """Detection efficiency eta must lie in (0, 1]."""
    pass


class InvalidStateError(DelayFeedbackError):
    """Initial superposition cannot be built (empty, or zero norm)."""
    pass


class SeriesOverflowError(DelayFeedbackError, ArithmeticError):
    """A delay-series term left the representable range in direct summation.

    Retry with ``summation_mode="log-domain-signed"``.
    """
    pass


class TermCapExceededError(DelayFeedbackError):
    """floor(t / tau) exceeds the configured series term cap."""
    pass


class StepTooLargeError(DelayFeedbackError, ValueError):
    """Method-of-steps step is too coarse for the delay (dx > y / 4)."""
    pass


class QuadratureError(DelayFeedbackError):
    """Adaptive quadrature could not reach the requested tolerance."""
    pass


class DomainError(DelayFeedbackError, ValueError):
    """Operation called outside the time or parameter domain it is valid on."""
    pass


class PhaseConventionError(DomainError):
    """Closed form derived for phi = 0 called with another phase."""
    pass


class TruncationLeakError(DelayFeedbackError):
    """Fock-basis integration put too much weight on the highest number state."""
    pass


class RegimeWarning(UserWarning):
    """Formula used outside the regime it was derived for."""
    pass
