"""Exception types shared across the package."""


class CapabilityError(ValueError):
    """A request exceeds a hard enumeration or simulation budget."""


class ConfigError(ValueError):
    """A configuration value or structure is invalid."""


class NotFoundError(ValueError):
    """A requested object (e.g. a cut of a given size) does not exist."""


class NumericalError(RuntimeError):
    """A numerical routine produced a non-finite value."""
