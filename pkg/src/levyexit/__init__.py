"""Exit problems for scalar dynamics driven by asymmetric stable noise.

The package has two independent engines for the same quantities:

* :mod:`levyexit.solver` discretizes the nonlocal generator on a uniform
  grid and solves a dense linear system for the mean exit time or the
  probability of leaving through the left boundary.
* :mod:`levyexit.mc` integrates sample paths of the driving process and
  estimates the same quantities from exit statistics.

:mod:`levyexit.stable` holds everything about the noise itself (jump
measure, characteristic exponent, density, sampling), :mod:`levyexit.drift`
the deterministic part (the immunized tumor growth field and its steady
states), and :mod:`levyexit.cli` the command line front end.
"""

from .drift import (
    DriftField,
    KineticConstants,
    SteadyStates,
    TumorDrift,
    TumorParams,
    ZeroDrift,
    nondimensionalize,
    potential,
    steady_states,
    tumor_drift,
)
from .errors import (
    LevyExitError,
    NumericalError,
    ParameterError,
    QuadratureError,
    SingularSystemError,
    SolutionBoundError,
)
from .mc import ExitStats, SimConfig, em_step, simulate_exit
from .solver import (
    ESCAPE_LEFT,
    MEAN_EXIT_TIME,
    DenseSystem,
    ExitProblem,
    Grid,
    RichardsonResult,
    SolveResult,
    assemble,
    richardson_check,
    solve,
    solve_dense,
)
from .stable import (
    FourierQuad,
    JumpMeasureCoeffs,
    PdfResult,
    StableNoiseParams,
    characteristic_exponent,
    compensator_drift,
    gaussian_limit_pdf,
    jump_coeffs,
    levy_integrability,
    sample_stable,
    stable_pdf,
)

__version__ = "0.1.0"

__all__ = [
    "DriftField",
    "KineticConstants",
    "SteadyStates",
    "TumorDrift",
    "TumorParams",
    "ZeroDrift",
    "nondimensionalize",
    "potential",
    "steady_states",
    "tumor_drift",
    "LevyExitError",
    "NumericalError",
    "ParameterError",
    "QuadratureError",
    "SingularSystemError",
    "SolutionBoundError",
    "ExitStats",
    "SimConfig",
    "em_step",
    "simulate_exit",
    "ESCAPE_LEFT",
    "MEAN_EXIT_TIME",
    "DenseSystem",
    "ExitProblem",
    "Grid",
    "RichardsonResult",
    "SolveResult",
    "assemble",
    "richardson_check",
    "solve",
    "solve_dense",
    "FourierQuad",
    "JumpMeasureCoeffs",
    "PdfResult",
    "StableNoiseParams",
    "characteristic_exponent",
    "compensator_drift",
    "gaussian_limit_pdf",
    "jump_coeffs",
    "levy_integrability",
    "sample_stable",
    "stable_pdf",
    "__version__",
]
