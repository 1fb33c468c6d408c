"""Exception types shared across the package."""


class SpecpredictError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(SpecpredictError, ValueError):
    """A shape, dimension, or value-contract violation in the inputs."""


class NumericalError(SpecpredictError, ArithmeticError):
    """Non-finite values or a failed factorization during training."""


class DataFormatError(SpecpredictError, ValueError):
    """A malformed input file.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
