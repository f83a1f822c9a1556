"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: invalid input / domain problems are
usage errors (exit 2), data-file problems are data errors (exit 3), and
a failed internal design verification is exit 4.
"""


class KSearchError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(KSearchError):
    """An argument violates a documented precondition (shape, sign, range)."""


class DomainError(KSearchError):
    """A numeric parameter lies outside the mathematical domain of an operation."""


class DataFormatError(KSearchError):
    """A data file could not be parsed; message names the offending row."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class ConstructionError(KSearchError):
    """A designed threshold schedule failed its own verification.

    This should never fire for parameters inside the feasible region; it
    indicates either an infeasible (eta, gamma) target or an internal bug.
    """
