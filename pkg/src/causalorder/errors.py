"""Exception types shared across the package."""


class CausalOrderError(Exception):
    """Base class for all package errors."""


class CycleError(CausalOrderError):
    """An edge set contains a directed cycle."""


class SelfLoopError(CausalOrderError):
    """An edge starts and ends at the same node."""


class InvariantError(CausalOrderError):
    """A dataset or matrix violates a structural invariant."""


class DegenerateColumnError(CausalOrderError):
    """An observational column is constant and cannot be standardized."""


class NonFiniteError(CausalOrderError):
    """Samples contain NaN or infinite values."""


class AllZeroError(CausalOrderError):
    """Every defined distance is zero; no threshold can be suggested."""


class UndefinedRowError(CausalOrderError):
    """A score would read a distance row with no interventional data."""


class TooLargeError(CausalOrderError):
    """Problem size exceeds the limit for exhaustive enumeration."""


class DomainError(CausalOrderError):
    """A bound formula was evaluated outside its parameter domain."""


class ConfigError(CausalOrderError):
    """An experiment configuration is invalid."""


class FormatError(CausalOrderError):
    """A data file does not match the documented format."""


class MissingBlockError(CausalOrderError):
    """A declared intervention target has no sample block."""
