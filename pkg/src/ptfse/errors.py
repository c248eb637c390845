"""Exception types shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, any
EnhancerError exits 2, verification failures exit 3.
"""


class EnhancerError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidInputError(EnhancerError, ValueError):
    """A runtime value violates an operation's precondition."""


class InvalidConfigError(EnhancerError, ValueError):
    """A configuration value is out of contract (bad key, bad size, ...)."""


class ShapeError(EnhancerError, ValueError):
    """Operand shapes do not agree. The message names both shapes."""


class ContractError(EnhancerError, RuntimeError):
    """An inter-module contract was violated (flags, checkpoint mismatch)."""


class UnsupportedFormatError(EnhancerError, ValueError):
    """A file is structurally valid but not a format this package accepts."""


class TrainingDivergedError(EnhancerError, RuntimeError):
    """Training produced a non-finite loss; message names step and block."""
