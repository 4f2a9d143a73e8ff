"""Exception types shared across the package."""


class DomainError(ValueError):
    """Evaluation point outside the admissible domain (branch cut, non-finite input)."""


class ParameterError(ValueError):
    """Constructor parameter outside its admissible range."""


class SingularityError(ArithmeticError):
    """A derivative or tangent fell below the configured floor."""


class QuadratureError(RuntimeError):
    """Numerical integration did not reach the requested tolerance."""


class EmptyInteriorError(RuntimeError):
    """A stencil operation found no interior nodes to work on."""


class ConvergenceError(RuntimeError):
    """An iteration (Newton, sequence extrapolation) failed to converge.

    ``best`` carries the best iterate seen, when one exists.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
