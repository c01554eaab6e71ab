"""
Exception hierarchy
===================

Every error raised by :mod:`workfringe` derives from :class:`WorkFringeError`,
which itself is a :class:`ValueError` so callers that only guard against bad
input keep working.
"""


class WorkFringeError(ValueError):
    """Base class for all library errors."""


class NonHermitianInput(WorkFringeError):
    pass


class SingularInput(WorkFringeError):
    pass


class SupportMismatch(WorkFringeError):
    pass


class DimensionMismatch(WorkFringeError):
    pass


class ContinuousModeRequested(WorkFringeError):
    """A step-wise operation was asked of a continuous protocol."""


class DiscreteModeRequested(WorkFringeError):
    """A closed-form continuous operation was asked of a step protocol."""


class NonBoundaryTime(WorkFringeError):
    pass


class InvalidBeta(WorkFringeError):
    pass


class OddSplitBoundary(WorkFringeError):
    pass


class IndexOutOfRange(WorkFringeError):
    pass


class InvalidAlpha(WorkFringeError):
    pass


class NonStochasticVisibilities(WorkFringeError):
    pass


class ConfigError(WorkFringeError):
    """Malformed or out-of-range run configuration (CLI exit code 2)."""


class NumericFailure(WorkFringeError):
    """A computed quantity violated its contract (CLI exit code 3)."""
