class SautPermError(Exception):
    """Base class for errors raised by this package."""


class InputError(SautPermError, ValueError):
    pass


class CapacityError(SautPermError):
    """A configured budget was exceeded; the computation did not finish."""

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = context or {}


class CheckpointError(SautPermError):
    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{path}: {message}")
        self.path = path
