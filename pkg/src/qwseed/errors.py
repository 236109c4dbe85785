class InputError(ValueError):
    """Invalid arguments or infeasible parameters."""


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(RuntimeError):
    """A dense or register-based simulation would exceed its configured size cap."""
