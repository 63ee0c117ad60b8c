"""Exception and warning types raised by rigidcover."""


class CoverError(ValueError):
    """Base class for all input and contract errors."""


class InvalidIntervalError(CoverError):
    pass


class InvalidCountError(CoverError):
    pass


class LengthMismatchError(CoverError):
    pass


class ShapeMismatchError(CoverError):
    pass


class GridMismatchError(CoverError):
    pass


class ZeroTensorError(CoverError):
    pass


class NotPositiveDefiniteError(CoverError):
    pass


class PartitionError(CoverError):
    pass


class UndefinedConditionalError(CoverError):
    pass


class AllInactiveError(CoverError):
    pass


class NotNormalizedError(CoverError):
    pass


class NotSeparableError(CoverError):
    pass


class RegionError(CoverError):
    pass


class DegenerateGridError(CoverError):
    pass


class TruncationWarning(UserWarning):
    """A generated state has not decayed at the grid edges."""


class CorollaryWarning(UserWarning):
    """The two covers of a pair disagree on the shrink verdict."""


class BorderlineWarning(UserWarning):
    """The Schmidt ratio fell between the separable and entangled thresholds."""


class NumericalHealthWarning(UserWarning):
    """A Gram determinant came out more negative than rounding allows."""
