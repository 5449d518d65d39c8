"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (bad modulus, syntax, non-unit, ...)."""


class ResourceError(RuntimeError):
    """A computation would exceed a configured size bound."""


class VerificationError(AssertionError):
    """A machine-checked claim about the groups or curves turned out false."""
