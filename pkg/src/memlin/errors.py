"""Exception types shared across the package."""


class MemlinError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(MemlinError, ValueError):
    """An input object or configuration violates a documented invariant."""


class RangeError(MemlinError, ValueError):
    """A sample or parameter falls outside its admissible range."""


class UndefinedMetricError(MemlinError, ValueError):
    """A metric is mathematically undefined for the given inputs."""


class SingularSystemError(MemlinError, RuntimeError):
    """A linear system could not be solved even with the pivoted fallback."""


class DesignError(MemlinError, RuntimeError):
    """No design candidate produced a usable solution."""
