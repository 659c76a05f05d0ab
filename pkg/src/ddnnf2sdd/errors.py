"""Exception hierarchy shared by all modules."""


class CircuitError(Exception):
    """Base class for every error raised by the toolkit."""


class StructuralError(CircuitError):
    """A node reference or tree shape is invalid."""


class InputError(CircuitError):
    """Caller-supplied data (assignment, variable set, index) is invalid."""


class PropertyViolation(CircuitError):
    """A required representation property does not hold.

    ``report`` carries the validator report with its witness when one is
    available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CapExceeded(CircuitError):
    """An exhaustive computation was refused because it exceeds the cap."""

    def __init__(self, needed, cap):
        super().__init__(f"{needed} variables exceed the exhaustive cap of {cap}")
        self.needed = needed
        self.cap = cap


class ParseError(CircuitError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
