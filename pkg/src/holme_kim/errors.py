class HkError(Exception):
    """Base class for errors raised by this package."""


class UndefinedInputError(HkError, ValueError):
    """A statistic was requested where it is not defined (e.g. degree < 2)."""


class IntegrityError(HkError):
    """Incremental state no longer matches the graph it claims to describe."""


class CapacityError(HkError):
    """An exhaustive enumeration would exceed the configured size limit."""

    def __init__(self, message: str, bound: int):
        super().__init__(message)
        self.bound = bound


class ResourceError(HkError):
    """The process ran out of memory or another hard resource."""


class InvariantError(HkError, AssertionError):
    """A structural invariant of a Holme-Kim graph does not hold."""
