"""Exception types raised by the library.

Every error derives from :class:`CWError` so callers (the CLI in
particular) can separate domain failures from programming errors.
"""


class CWError(Exception):
    """Base class for all library errors."""


class InvalidInput(CWError, ValueError):
    """Malformed argument: wrong shape, non-finite values, bad range."""


class DimensionMismatch(InvalidInput):
    pass


class EmptySample(InvalidInput):
    pass


class ZeroDirection(InvalidInput):
    pass


class DependentBasis(CWError):
    """The vectors handed to a sum-basis construction are not independent."""


class NoWitness(CWError):
    """The direction set is an sm-uniqueness set, so no witness exists."""


class ZeroWitness(InvalidInput):
    pass


class NotPsd(CWError):
    """Scale matrix has a clearly negative eigenvalue."""


class NotPd(CWError):
    """Scale matrix is not strictly positive definite."""


class UnsupportedGenerator(CWError):
    pass


class BadSplit(InvalidInput):
    pass


class BadLabels(InvalidInput):
    pass


class UnknownDirection(InvalidInput):
    pass
