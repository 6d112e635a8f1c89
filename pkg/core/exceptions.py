"""
Exceptions raised on misuse of the numerical operations.

Divergence of an integral is not an error: it is reported as a verdict on the
result objects. The classes below signal inputs an operation cannot accept.
"""


class OrliczError(ValueError):
    """Base class for all input errors of the package."""


class DomainError(OrliczError):
    """Inputs outside the domain of an operation (e.g. a non-increasing phi)."""


class DimensionMismatchError(OrliczError):
    pass


class MissingGradientError(OrliczError):
    pass


class NotCenteredError(OrliczError):
    pass


class NonPositiveDensityError(OrliczError):
    pass


class NegativeWeightError(OrliczError):
    pass


class OutsideProperDomainError(OrliczError):
    """The cumulant functional is infinite at the requested statistic."""


class UnboundedDerivativeError(OrliczError):
    pass


class ExpressionError(OrliczError):
    """Unknown preset name or malformed expression JSON."""
