"""Exception hierarchy shared across the toolkit.

The CLI maps these onto distinct exit codes, so raising the right class
matters more than the message text: I/O problems -> DataIOError,
bad content or insufficient data -> ValidationError, numerically
degenerate situations -> NumericError.
"""


class PerflawError(Exception):
    """Base class for all toolkit errors."""


class DataIOError(PerflawError):
    """A file is missing, unreadable, or cannot be located."""


class ValidationError(PerflawError):
    """Input content violates an invariant or a precondition."""


class DataFormatError(ValidationError):
    """Malformed record in an input file; carries the offending line."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class InsufficientDataError(ValidationError):
    """Not enough observations to perform a fit or search."""


class InfeasibleBudgetError(ValidationError):
    """No grid point satisfies the requested budget."""


class NumericError(PerflawError):
    """A computation cannot proceed for numerical reasons."""


class DegenerateSequenceError(NumericError):
    """ApEn is (numerically) zero, so its reciprocal is undefined."""
