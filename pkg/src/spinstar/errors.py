"""Exception hierarchy shared by every module."""


class SpinStarError(Exception):
    """Base class for library errors."""


class DomainError(SpinStarError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ResourceError(SpinStarError):
    """A size cap (Hilbert space dimension, entry count) would be exceeded."""


class AccuracyError(SpinStarError):
    """A requested tolerance could not be met.

    ``bound`` carries the best error estimate that was achieved.
    """

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class UnsupportedError(SpinStarError):
    """The operation is only defined for a narrower class of inputs."""
