"""Exception hierarchy shared by every greenloop module."""


class GreenloopError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(GreenloopError, ValueError):
    pass


class DimensionError(GreenloopError, ValueError):
    pass


class InstanceValidationError(GreenloopError, ValueError):
    """An instance document or object breaks a data invariant.

    ``key`` holds the dotted path of the offending entry, e.g. ``parameters.hd``.
    """

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class SchemaVersionError(InstanceValidationError):
    pass


class FrontFormatError(GreenloopError, ValueError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class ModelInfeasibleError(GreenloopError):
    pass


class InvalidReferenceError(GreenloopError, ValueError):
    pass


class ComparisonError(GreenloopError, ValueError):
    pass


class GenerationError(GreenloopError):
    pass


class EnumerationBoundError(GreenloopError, ValueError):
    pass


class SolverLimitError(GreenloopError):
    """A node or iteration limit stopped a solve before any usable answer."""
