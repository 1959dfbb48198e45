"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A parameter set violates a model invariant."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to converge.

    ``partial`` carries the last value reached before giving up, when one
    exists.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
