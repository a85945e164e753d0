"""Exception types raised by the library.

All of them derive from :class:`ValueError` so callers that only care about
bad input can catch that.
"""


class ParameterError(ValueError):
    """A parameter lies outside the domain of the model."""


class InsufficientDataError(ValueError):
    """A sequence or sample is too short for the requested estimate."""


class RangeError(ValueError):
    """An index or horizon exceeds what an object supports."""


class DegenerateCouplingError(ValueError):
    """A Beta coupling contains a zero entry."""


class DomainError(ValueError):
    """A formula was evaluated outside the region where it is defined."""
