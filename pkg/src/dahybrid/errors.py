"""Exception types shared across the package."""


class DAError(Exception):
    """Base class for all errors raised by dahybrid."""


class DomainError(DAError, ValueError):
    """An argument lies outside the operation's legal range."""


class DimensionError(DomainError):
    """Vector lengths do not agree."""


class ModelRangeError(DomainError):
    """A request falls outside the range covered by the cost tables."""


class TractabilityError(DomainError):
    """An exhaustive oracle was asked to enumerate a space beyond its guard."""


class ConfigSyntaxError(DAError):
    """A cost configuration document could not be parsed."""


class ConfigValidationError(DAError):
    """A cost configuration parsed but violates an invariant."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class SynthesisError(DAError):
    """The compressor catalog cannot realize the requested reduction."""


class AssignmentError(DAError):
    """A tap assignment is not a bijection onto the filter taps."""


class SimulationConfigError(DAError):
    """LUT contents do not match the plan being simulated."""


class OracleMismatchError(DAError):
    """A simulated output disagrees with the direct-form result."""
