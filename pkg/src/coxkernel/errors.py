"""Exception types shared across the package."""


class CoxKernelError(Exception):
    """Base class for package errors."""


class InvalidParameterError(CoxKernelError, ValueError):
    """A parameter lies outside its admissible range."""


class InvalidInputError(CoxKernelError, ValueError):
    """An argument has the wrong shape or is otherwise unusable."""


class SingularityError(CoxKernelError, ValueError):
    """The baseline hazard diverges at the requested time."""


class OutOfRangeError(CoxKernelError, ValueError):
    """A value exceeds the range of the function being inverted."""


class InvalidDataError(CoxKernelError, ValueError):
    """Market data cannot be turned into returns or a calendar."""


class ParseError(CoxKernelError, ValueError):
    """A CSV file could not be parsed.

    Attributes
    ----------
    row : int or None
        1-based data row number (header excluded) where parsing failed.
    source : str or None
        File name, when known.
    """

    def __init__(self, message, row=None, source=None):
        self.row = row
        self.source = source
        where = []
        if source:
            where.append(str(source))
        if row is not None:
            where.append(f"row {row}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
