"""Exception types raised by the deblurring toolkit.

All classes derive from ValueError so call sites that only care about
"bad input" can catch a single base type. The CLI maps ConfigError and
file-format problems to exit code 2 and numeric failures to exit code 3.
"""


class InvalidParameterError(ValueError):
    """A scalar parameter is out of its documented range."""


class SizeMismatchError(ValueError):
    """An array does not have the shape a routine requires."""


class SizeGuardError(ValueError):
    """A dense oracle was asked for a problem too large to materialize."""


class SupportConditionError(ValueError):
    """A blur mask is too wide for the image under the chosen boundary rule."""


class AsymmetricMaskError(ValueError):
    """A routine that needs a centrosymmetric mask received one that is not."""


class NotSeparableError(ValueError):
    """A routine that needs a rank-one mask received one that is not."""


class UnsupportedAlgebraError(ValueError):
    """The boundary rule has no fast spectral decomposition."""


class SingularMixingError(ValueError):
    """The cross-channel mixing matrix is singular and cannot be inverted."""


class FormatError(ValueError):
    """An image or mask file is malformed.

    Parameters
    ----------
    message : str
        Human-readable description of the problem.
    offset : int, optional
        Byte offset in the file at which the problem was detected.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ConfigError(ValueError):
    """An experiment configuration is incomplete or inconsistent."""
