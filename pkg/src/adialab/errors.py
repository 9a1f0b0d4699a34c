"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the documented domain of an operation."""


class NumericError(ArithmeticError):
    """A computation hit non-finite values or failed to converge."""


class ResourceLimitError(RuntimeError):
    """A configured resource ceiling was exceeded.

    ``partial`` carries whatever progress was made before the limit hit
    (integration time reached, last state, ...) so callers can report it.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
