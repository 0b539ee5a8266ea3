"""Exception types shared across the package.

Two failure families matter to callers: bad inputs (parameters, grids,
configs) and numerical breakdown (quadrature budget exhausted, singular
systems, solutions failing sanity bounds). The CLI maps the first family to
exit code 2 and the second to exit code 3.
"""


class LevyExitError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(LevyExitError, ValueError):
    """A parameter, grid, or config invariant was violated.

    Messages always name the violated bound, e.g.
    ``"alpha must lie in (0, 2), got 2.0"``.
    """


class NumericalError(LevyExitError, RuntimeError):
    """A numerical procedure failed at runtime despite valid inputs."""


class QuadratureError(NumericalError):
    """Fourier inversion did not meet the requested tolerance in budget."""

    def __init__(self, message, *, achieved=None, requested=None,
                 n_nodes=None, lambda_max=None):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested
        self.n_nodes = n_nodes
        self.lambda_max = lambda_max


class SingularSystemError(NumericalError):
    """Dense LU factorization found no usable pivot."""

    def __init__(self, message, *, pivot_index=None, pivot_value=None):
        super().__init__(message)
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value


class SolutionBoundError(NumericalError):
    """A solve produced values violating a hard sanity bound.

    Raised e.g. for mean exit times below -1e-8 or escape probabilities
    leaving [0, 1] by more than the clamp threshold.
    """
