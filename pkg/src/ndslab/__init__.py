"""Exact, horizon-bounded transitivity and mixing checks for non-autonomous discrete systems."""

__version__ = "0.1.0"

from .errors import InvalidArgument, NdsError, OutOfHorizon, ResourceLimit, UnsupportedOperation
from .verdict import CheckSpec, Status, Verdict

__all__ = [
    "CheckSpec",
    "InvalidArgument",
    "NdsError",
    "OutOfHorizon",
    "ResourceLimit",
    "Status",
    "UnsupportedOperation",
    "Verdict",
    "__version__",
]
