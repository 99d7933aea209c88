"""Exception types shared across the package."""


class TailCvarError(Exception):
    """Base class for all errors raised by tailcvar."""


class DomainError(TailCvarError, ValueError):
    """An argument lies outside the domain of the requested function."""


class ConvergenceError(TailCvarError, RuntimeError):
    """An iterative numerical procedure failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message if iterations is None else f"{message} (after {iterations} iterations)")
        self.iterations = iterations


class FitError(TailCvarError, RuntimeError):
    """Maximum-likelihood fitting could not produce a valid estimate."""


class DataError(TailCvarError, ValueError):
    """Input data could not be parsed or is unsuitable for the requested method."""
