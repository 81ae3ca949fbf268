"""Exception hierarchy shared by every module."""


class CVTeleError(Exception):
    """Base class for all package errors."""


class InvalidArgument(CVTeleError, ValueError):
    """An argument is out of range or has the wrong shape."""


class UnphysicalParameter(CVTeleError, ValueError):
    """A state parameter would violate the uncertainty principle."""


class UnphysicalState(UnphysicalParameter):
    """A covariance matrix or variance pair is not a valid quantum state."""


class InconsistentMeasurement(CVTeleError, ValueError):
    """Measured data cannot be explained by the assumed loss model."""


class UnsupportedOperation(CVTeleError, NotImplementedError):
    """The operation is only defined for a narrower class of states."""
