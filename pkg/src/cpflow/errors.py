"""Exception types shared across the package."""


class DomainError(ValueError):
    """A numeric argument lies outside its mathematical domain."""


class InputError(ValueError):
    """Structurally bad input: unknown identifiers, mismatched dimensions."""


class SizeError(InputError):
    """An exact method was asked to handle an instance above its size guard."""


class ParseError(ValueError):
    """Malformed instance document."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    The best available estimate is kept on the exception so callers can
    decide whether to use it anyway.
    """

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


class NonConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class IntegrationError(RuntimeError):
    """The ODE integrator could not proceed (step-size underflow).

    Carries the partial trace accumulated up to the failure point.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace
