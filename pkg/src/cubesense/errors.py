"""Exception types shared across the package."""


class CubeSenseError(Exception):
    """Base class for all errors raised by cubesense."""


class ParseError(CubeSenseError, ValueError):
    """Malformed hex table, vertex set or matrix dump."""


class DimensionTooLarge(CubeSenseError, ValueError):
    """Requested dimension exceeds what an exact routine supports."""


class UnknownGenerator(CubeSenseError, KeyError):
    pass


class InvalidParams(CubeSenseError, ValueError):
    pass


class EmptySelection(CubeSenseError, ValueError):
    pass


class IndexOutOfRange(CubeSenseError, IndexError):
    pass


class DimensionMismatch(CubeSenseError, ValueError):
    pass


class ConvergenceFailure(CubeSenseError, RuntimeError):
    """An iterative eigensolver hit its iteration cap."""


class NotFound(CubeSenseError, LookupError):
    pass


class CounterexampleFound(CubeSenseError, AssertionError):
    """A verification pipeline found an instance violating a checked identity.

    The partially filled report is attached so callers can persist the
    offending instance.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
