"""Exception hierarchy shared by the engine and the command line."""


class QuantInvError(Exception):
    """Base class for every domain error raised by the engine."""


class InputError(QuantInvError):
    """Raised when user-supplied text cannot be turned into a domain object."""


class ParseError(InputError):
    """Raised on a malformed token in braid, PD, polynomial or observable text."""


class LabelRangeError(InputError):
    """Raised when a braid generator or fusion label is out of range."""


class VariableMismatchError(QuantInvError):
    """Raised when two Laurent polynomials carry different variable tags."""


class ParityError(QuantInvError):
    """Raised when an even-exponent reindex meets an odd exponent."""


class DiagramValidityError(QuantInvError):
    """Raised when a diagram violates the arc-label rules."""


class OrientationError(QuantInvError):
    """Raised when strand orientations cannot be assigned consistently."""


class CrossingIndexError(QuantInvError):
    """Raised when a crossing index is outside the diagram."""


class StateSumLimitError(QuantInvError):
    """Raised when a diagram has too many crossings for the state sum."""


class CompositionError(QuantInvError):
    """Raised when cobordism arities do not compose."""


class VerlindeRoundingError(QuantInvError):
    """Raised when a Verlinde sum is not numerically close to an integer."""


class DimensionMismatchError(QuantInvError):
    """Raised when observables or operators live on different phase spaces."""


class AlgebraError(QuantInvError):
    """Raised when a Frobenius algebra fails its identities or has a degenerate pairing."""
