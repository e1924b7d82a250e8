"""Exception types shared across the package."""


class ClimeshError(Exception):
    """Base class for all package errors."""


class DomainError(ClimeshError, ValueError):
    """An input is outside the physical or mathematical domain of an operation."""


class FormatError(ClimeshError, ValueError):
    """Malformed structured input (grids, configs, files)."""


class ConfigError(ClimeshError, ValueError):
    """Invalid scenario or profile configuration."""


class NoDataError(ClimeshError, ValueError):
    """An operation received an empty input it cannot classify."""


class RoutingError(ClimeshError, ValueError):
    """A packet cannot be routed on the current tree."""


class StorageError(ClimeshError, OSError):
    """Persistent store failure (bad layout, checksum mismatch, write failure)."""


class NotReadyError(ClimeshError, RuntimeError):
    """A precondition on stored data is not met yet (e.g. no closed day)."""
