"""Exception types shared across the package."""


class LacunaryError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LacunaryError, ValueError):
    """Input violates an operation's precondition."""


class CapacityError(LacunaryError, OverflowError):
    """A generated integer would exceed the declared integer capacity."""


class CapabilityError(LacunaryError):
    """A request exceeds a configured search cap (e.g. too many terms)."""


class VersionMismatchError(LacunaryError):
    """Artifacts written by different format versions were mixed."""
