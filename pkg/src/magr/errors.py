"""Exception types raised across the package."""


class MagrError(Exception):
    """Base class for all errors raised by :mod:`magr`."""


class InputError(MagrError, ValueError):
    """Malformed or inconsistent input (e.g. series of unequal length)."""


class InsufficientDataError(MagrError, ValueError):
    """Too few usable samples or rows for the requested computation."""


class DegenerateInputError(MagrError, ValueError):
    """Input is all-absent or has zero variance where variance is needed."""


class ParameterError(MagrError, ValueError):
    """An estimator or generator parameter is out of range."""


class FeasibilityError(MagrError, RuntimeError):
    """A gap plan could not be realized within the attempt budget."""


class GenerationError(MagrError, RuntimeError):
    """A system simulation diverged beyond the restart budget."""


class UndefinedMeasureError(MagrError, ValueError):
    """A measure cannot be evaluated, e.g. a vanishing correlation sum."""


class ParseError(MagrError, ValueError):
    """A CSV cell could not be parsed as a number."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class FormatError(MagrError, ValueError):
    """A CSV file has a structural problem (ragged rows, missing header)."""


class DomainError(MagrError, ValueError):
    """A value is outside the mathematical domain of an operation."""
