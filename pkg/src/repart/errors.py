"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: InputError -> 1,
ResourceLimitError -> 2, InvariantViolation and VerificationError -> 3.
"""


class RepartError(Exception):
    """Base class for all package errors."""


class InputError(RepartError):
    """Malformed or out-of-range user input."""


class ResourceLimitError(RepartError):
    """A guard on instance size or search budget was exceeded."""


class InvariantViolation(RepartError):
    """An internal contract was broken; indicates a bug, not bad input."""


class VerificationError(RepartError):
    """A runtime verification check failed."""
