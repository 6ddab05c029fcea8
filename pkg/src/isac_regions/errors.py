"""Exception hierarchy shared by every module of the package.

Each class name doubles as the error name printed by the CLI, so keep them
stable.
"""


class IsacError(Exception):
    """Base class for all domain errors raised by this package."""


class NegativeMass(IsacError, ValueError):
    """A probability entry is below ``-tol``."""


class MassMismatch(IsacError, ValueError):
    """Probabilities do not sum to one within tolerance."""


class DomainError(IsacError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class DimMismatch(IsacError, ValueError):
    """Array shapes or alphabet sizes are inconsistent."""


class InvalidKernel(IsacError, ValueError):
    """A conditional kernel row is not a probability vector."""


class InvalidDistortion(IsacError, ValueError):
    """Distortion matrix has a negative or non-finite entry."""


class BadAxes(IsacError, ValueError):
    """Axis selection is out of range or repeats an axis."""


class OverlappingGroups(IsacError, ValueError):
    """Variable groups passed to an information measure share an axis."""


class ParseError(IsacError, ValueError):
    """A channel description document is malformed."""


class IncompleteTable(IsacError, ValueError):
    """An estimator table does not cover the observation alphabet."""


class TooLarge(IsacError, ValueError):
    """Exhaustive enumeration would exceed the configured limit."""


class NotDegraded(IsacError, ValueError):
    """Operation requires a stochastically degraded channel."""


class EmptyGrid(IsacError, ValueError):
    """A distortion grid contains no budgets."""
