"""Exception hierarchy shared by all bklab modules."""


class BkLabError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(BkLabError):
    """Matrix or block dimensions are incompatible with the operation."""


class GradeError(BkLabError):
    """A declared grade is invalid (for instance, smaller than the degree)."""


class DegenerateRowError(BkLabError):
    """An operation that needs nonzero rows met an identically zero row."""


class PlacementError(BkLabError):
    """A coefficient placement violates its pattern or the antidiagonal sums."""


class PreconditionError(BkLabError):
    """A norm radius required by one of the perturbation results is violated.

    The ``inequality`` attribute names the violated condition so callers can
    report exactly which hypothesis failed.
    """

    def __init__(self, message, inequality=""):
        super().__init__(message)
        self.inequality = inequality


class ConvergenceError(BkLabError):
    """The fixed-point iteration hit its cap without meeting the stopping rule."""


class InconclusiveError(BkLabError):
    """A bounded scan ended before the sought structure was fully determined."""


class EigenstructureShiftError(BkLabError):
    """A minimal index is smaller than its shift; the input cannot be the
    eigenstructure of a valid block Kronecker linearization."""


class LayoutError(BkLabError):
    """A structural identity that must hold by construction failed, which
    signals a bug rather than bad input."""
