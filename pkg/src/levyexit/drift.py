"""Deterministic part of the dynamics: the immunized tumor-growth drift,
its potential, the steady states, and a small drift-field abstraction so the
solver and the simulator stay model-agnostic.

The dimensionless model is

    f(x) = x (1 - theta x) - gamma x / (x + 1),

logistic growth inhibited by a hyperbolic immune-response term.  States are
cell counts rescaled by k1/k2, time is rescaled by the replication rate, and
the two surviving parameters are theta = k2/k1 and gamma = k1 E / iota.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "KineticConstants",
    "TumorParams",
    "SteadyStates",
    "DriftField",
    "TumorDrift",
    "ZeroDrift",
    "tumor_drift",
    "potential",
    "steady_states",
    "nondimensionalize",
]


@dataclass(frozen=True)
class KineticConstants:
    """Raw reaction-rate constants of the cell-kinetics scheme.

    k1:      binding rate of immune cells to tumor cells (day^-1)
    k2:      dissociation rate of the bound complex (day^-1)
    e_total: conserved total immune-cell mass
    iota:    tumor replication rate (day^-1)

    The spontaneous normal-to-neoplastic transformation channel is orders of
    magnitude slower than replication and is not modelled here.
    """

    k1: float
    k2: float
    e_total: float
    iota: float

    def __post_init__(self):
        for name in ("k1", "k2", "e_total", "iota"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v) or v <= 0.0:
                raise ParameterError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class TumorParams:
    """Dimensionless model parameters.

    Requires 0 < theta < 1 and 0 < gamma < (1 + theta)^2 / (4 theta); the
    upper bound keeps the interior steady states real and distinct.
    """

    theta: float
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "gamma", float(self.gamma))
        if not math.isfinite(self.theta) or not (0.0 < self.theta < 1.0):
            raise ParameterError(f"theta must lie in (0, 1), got {self.theta}")
        bound = (1.0 + self.theta) ** 2 / (4.0 * self.theta)
        if not math.isfinite(self.gamma) or not (0.0 < self.gamma < bound):
            raise ParameterError(
                f"gamma must lie in (0, (1+theta)^2/(4 theta)) = (0, {bound:.6g}), "
                f"got {self.gamma}")


@dataclass(frozen=True)
class SteadyStates:
    """The three zeros of the drift: extinction, low tumor mass, high tumor mass."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        if not (self.x1 == 0.0 and 0.0 < self.x2 < self.x3):
            raise ParameterError(
                f"steady states must satisfy 0 = x1 < x2 < x3, got "
                f"({self.x1}, {self.x2}, {self.x3})")


def tumor_drift(x, params: TumorParams):
    """Evaluate f(x) = x (1 - theta x) - gamma x / (x + 1).

    Vectorized; every evaluation point must satisfy x > -1 (the immune term
    has a pole at -1).
    """
    xs = np.asarray(x, dtype=float)
    if not np.all(xs > -1.0):
        raise ParameterError("tumor drift requires x > -1 at every point")
    out = xs * (1.0 - params.theta * xs) - params.gamma * xs / (xs + 1.0)
    return float(out) if out.ndim == 0 else out


def potential(x, params: TumorParams):
    """Potential U with U' = -f, fixed by U(0) = 0.

    U(x) = -x^2/2 + theta x^3/3 + gamma x - gamma ln(1 + x), for x > -1.
    """
    xs = np.asarray(x, dtype=float)
    if not np.all(xs > -1.0):
        raise ParameterError("potential requires x > -1 at every point")
    out = (-0.5 * xs ** 2 + params.theta * xs ** 3 / 3.0
           + params.gamma * xs - params.gamma * np.log1p(xs))
    return float(out) if out.ndim == 0 else out


def steady_states(params: TumorParams) -> SteadyStates:
    """Solve f = 0: x1 = 0 and the two roots of theta x^2 - (1-theta) x + (gamma-1).

    Raises a parameter error when the discriminant (1+theta)^2 - 4 gamma theta
    is not positive or when the lower interior root is not positive (the
    latter needs gamma > 1; below that the model has no bistable structure).
    """
    th, ga = params.theta, params.gamma
    disc = (1.0 + th) ** 2 - 4.0 * ga * th
    if disc <= 0.0:
        raise ParameterError(
            f"discriminant (1+theta)^2 - 4 gamma theta = {disc:.6g} must be "
            f"positive for distinct interior steady states")
    root = math.sqrt(disc)
    x2 = (1.0 - th - root) / (2.0 * th)
    x3 = (1.0 - th + root) / (2.0 * th)
    if x2 <= 0.0:
        raise ParameterError(
            f"lower interior steady state x2 = {x2:.6g} must be positive; "
            f"this requires gamma > 1")
    return SteadyStates(x1=0.0, x2=x2, x3=x3)


def nondimensionalize(k: KineticConstants) -> TumorParams:
    """Reduce kinetic constants to (theta, gamma) = (k2/k1, k1 e_total/iota).

    Raises the TumorParams error when the reduced values leave the admissible
    window, naming the violated bound.
    """
    return TumorParams(theta=k.k2 / k.k1, gamma=k.k1 * k.e_total / k.iota)


class DriftField:
    """An evaluatable drift x -> f(x), vectorized over numpy arrays.

    Subclasses implement __call__.  Keeping this minimal lets the solver and
    the simulator accept other models without changes.
    """

    def __call__(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class TumorDrift(DriftField):
    """Drift field of the tumor model."""

    params: TumorParams

    def __call__(self, x):
        return tumor_drift(x, self.params)


@dataclass(frozen=True)
class ZeroDrift(DriftField):
    """f = 0; isolates the pure noise-driven exit behaviour."""

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        return 0.0 if xs.ndim == 0 else np.zeros_like(xs)
