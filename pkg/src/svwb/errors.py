"""Exception hierarchy.

Each top-level family maps to a CLI exit code: configuration problems exit 2,
image/file I/O problems exit 3 and numeric failures exit 4.
"""


class SVWBError(Exception):
    exit_code = 1


class ConfigError(SVWBError, ValueError):
    """Invalid user-supplied configuration (anchors, layouts, scene specs)."""

    exit_code = 2

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class BoundsError(ConfigError):
    """A region or coordinate falls outside the image."""


class ShapeError(ConfigError):
    """Images or arrays with incompatible dimensions."""


class InputRangeError(SVWBError, ValueError):
    exit_code = 2


class ImageIOError(SVWBError, OSError):
    exit_code = 3


class UnsupportedFormatError(ImageIOError):
    pass


class CorruptImageError(ImageIOError):
    pass


class NumericError(SVWBError, ArithmeticError):
    exit_code = 4


class DegenerateWhiteError(NumericError):
    """A white point whose cone response has a non-positive component."""

    def __init__(self, message, component=None):
        self.component = component
        super().__init__(message)


class DegenerateEstimateError(NumericError):
    pass


class UnderdeterminedError(NumericError):
    pass


class ZeroNormError(NumericError):
    """Angular error is undefined for a zero-length vector."""
