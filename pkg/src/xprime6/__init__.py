"""Finite group, symbolic and sampling checks for elliptic curves over Q whose
2-division field lies inside the 3-division field."""

__version__ = "0.1.0"

from .errors import InputError, ResourceError, VerificationError
from .modring import Mat2, gl2_order
from .groups import FinGroup, closure, gl2, sl2

__all__ = [
    "FinGroup",
    "InputError",
    "Mat2",
    "ResourceError",
    "VerificationError",
    "closure",
    "gl2",
    "gl2_order",
    "sl2",
    "__version__",
]
