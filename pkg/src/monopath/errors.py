"""Exception types shared across the package."""


class GraphFormatError(ValueError):
    """Raised when a graph file or edge list is malformed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PreconditionError(ValueError):
    """A documented hypothesis of an operation does not hold."""

    def __init__(self, name, message):
        self.name = name
        super().__init__(f"{name}: {message}")


class InvariantViolation(AssertionError):
    """A property that must hold by construction was observed to fail.

    Seeing this exception means either a bug or an input that breaks the
    assumptions of the construction; callers should dump a reproducer.
    """
