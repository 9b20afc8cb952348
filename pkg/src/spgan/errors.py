"""Exception hierarchy shared by every spgan module.

All domain failures derive from SpganError so the CLI can map them to a
single exit code; usage errors are left to the argument parser.
"""


class SpganError(Exception):
    """Base class for all domain errors raised by spgan."""


class DimensionError(SpganError):
    """Spatial shapes of two grids/tensors do not line up."""


class ParameterError(SpganError):
    """An argument is outside its documented domain."""


class FormatError(SpganError):
    """A file on disk does not parse or violates an invariant."""


class StateError(SpganError):
    """An operation was invoked in the wrong lifecycle state."""


class ConfigurationError(SpganError):
    """A required backend, checkpoint or config entry is unavailable."""


class DataError(SpganError):
    """A dataset or corpus is empty or inconsistent."""
