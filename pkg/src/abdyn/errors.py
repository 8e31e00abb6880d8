"""Exception types shared across the package."""


class AbdynError(Exception):
    """Base class for all package errors."""


class InputError(AbdynError):
    """Bad caller-supplied data: invalid node ids, malformed files."""


class ConfigError(AbdynError):
    """Invalid configuration: bad thresholds, failed property checks, bad scheduler setup."""


class ContractError(AbdynError):
    """An internal invariant was violated; indicates a bug, not bad input."""
