"""Exception hierarchy shared across the package."""


class AsymrenError(Exception):
    """Base class for all package-specific failures."""


class DomainError(AsymrenError):
    """An argument fell outside the mathematical domain of an operation."""


class NotDifferentiableError(DomainError):
    """Derivative requested at the break point of a piecewise map."""


class BracketError(AsymrenError):
    """A root bracket does not actually straddle a sign change."""


class PrecisionError(AsymrenError):
    """Requested tolerance or operation is unrepresentable at the working precision."""


class LevelNotBornError(AsymrenError):
    """A renormalization level does not exist at the given parameter."""

    def __init__(self, level, message=""):
        self.level = level
        super().__init__(message or f"level {level} is not born at this parameter")


class SearchExhaustedError(AsymrenError):
    """An upward parameter scan ran out of room without finding its target."""


class ContinuationError(AsymrenError):
    """Orbit continuation in parameter failed (orbit lost or not yet born)."""


class EscapeError(AsymrenError):
    """An orbit left the region where the computation is meaningful."""


class CoverIntegrityError(AsymrenError):
    """Interval cover failed a disjointness or nesting check."""


class InsufficientDataError(AsymrenError):
    """Not enough trusted levels / samples to run the requested analysis."""
