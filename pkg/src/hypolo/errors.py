"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`HypoloError`.
Validation errors also derive from :class:`ValueError` so generic callers can
catch them the usual way.
"""


class HypoloError(Exception):
    """Base class for all package errors."""


class OutsideDisk(HypoloError, ValueError):
    """A point lies on or beyond the (margin-shrunk) unit circle."""


class NonFinite(HypoloError, ValueError):
    """A coordinate is NaN or infinite."""


class InvalidSigma(HypoloError, ValueError):
    """Dispersion parameter is not a positive finite number."""


class NoConvergence(HypoloError, RuntimeError):
    """Iterative solver ran out of iterations."""


class KTooLarge(HypoloError, ValueError):
    """Neighborhood size k is not in [1, n - 1]."""


class EmptyDataset(HypoloError, ValueError):
    pass


class UnknownId(HypoloError, KeyError):
    pass


class ParseError(HypoloError, ValueError):
    """Malformed input row. ``line`` holds the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateId(ParseError):
    pass


class InvalidSpec(HypoloError, ValueError):
    pass


class DegenerateLabels(HypoloError, ValueError):
    """Labels contain a single class, so ROC analysis is undefined."""


class MismatchedIds(HypoloError, ValueError):
    pass
