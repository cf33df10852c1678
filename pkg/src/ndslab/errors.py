"""Exception hierarchy shared by every ndslab module."""


class NdsError(Exception):
    """Base class for library errors."""


class InvalidArgument(NdsError, ValueError):
    pass


class UnsupportedOperation(NdsError):
    """Raised when an exact computation is not available for a map/space pair."""


class OutOfHorizon(NdsError):
    """An index beyond the evaluation bound of an explicit sequence was requested."""


class ResourceLimit(NdsError):
    """An enumeration would exceed its configured cap."""

    def __init__(self, message, count=None, cap=None):
        super().__init__(message)
        self.count = count
        self.cap = cap
