"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can emit
structured diagnostics on stderr.
"""


class DscError(Exception):
    """Base class for all package errors."""

    code = "error"


class InvalidParameterError(DscError, ValueError):
    """A configuration or generator parameter is out of its valid range."""

    code = "invalid-parameter"


class InvalidInputError(DscError, ValueError):
    """An input signal or matrix does not meet an operation's preconditions."""

    code = "invalid-input"


class ShapeMismatchError(DscError, ValueError):
    """Operands have incompatible lengths, rates or dimensions."""

    code = "shape-mismatch"


class InsufficientDataError(DscError, ValueError):
    """Not enough samples/frames/points for the requested estimator."""

    code = "insufficient-data"


class NonInvertibleConfigError(DscError, ValueError):
    """Window/hop combination does not satisfy the overlap-add condition."""

    code = "non-invertible-config"


class StageCollapseError(DscError, RuntimeError):
    """A clustering stage left too few frames for the next stage."""

    code = "stage-collapse"

    def __init__(self, stage: int, message: str):
        super().__init__(message)
        self.stage = stage


class InsufficientPeaksError(DscError, RuntimeError):
    """Fewer qualifying envelope-spectrum peaks than needed for a frequency estimate."""

    code = "insufficient-peaks"


class HarmonicRangeError(DscError, ValueError):
    """A requested harmonic lies beyond the available spectrum."""

    code = "harmonic-out-of-range"


class AudioFormatError(DscError, ValueError):
    """Unsupported or malformed audio file."""

    code = "audio-format"


class ConfigError(DscError, ValueError):
    """Malformed run configuration (unknown keys, wrong types, bad values)."""

    code = "config"
