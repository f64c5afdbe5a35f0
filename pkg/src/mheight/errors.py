"""Exception types shared across the package."""


class MHeightError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(MHeightError, ValueError):
    """An argument is outside an operation's documented domain."""


class CapacityError(MHeightError):
    """Problem size exceeds what the small dense engines are built for."""


class UnsupportedFamilyError(MHeightError):
    """The operation requires one of the built-in code families."""


class NoFiniteRatioError(MHeightError):
    """A finite threshold ratio was requested for an infinite height."""
