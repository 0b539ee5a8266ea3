"""Dense discretization of exit problems for a scalar jump diffusion.

The nonlocal generator

    L u(x) = f(x) u'(x) + (d/2) u''(x)
             + int [u(x+y) - u(x) - y u'(x) 1_{|y|<1}] nu(dy)

acts on functions prescribed outside a bounded interval D = (a, b); nu is
the asymmetric power-law jump measure of `stable`.  The mean exit time
solves L u = -1 with u = 0 outside D, and the probability of leaving
through the left side solves L p = 0 with p = 1 on (-inf, a] and p = 0 on
[b, inf).

On a uniform grid that resolves a, b and the unit compensator radius, each
row splits the jump integral into a symmetric part (strength c2 on both
sides) and a one-sided remainder (strength c1 - c2 on the right), both
evaluated by the trapezoid rule with the singular node punched out.  Jump
mass landing beyond the domain becomes a killing term; for the escape
problem the mass beyond the left boundary also feeds a known source.  Rows
are assembled over every node of [a, b], then the boundary columns are
folded into the right-hand side.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .drift import DriftField, ZeroDrift
from .errors import (NumericalError, ParameterError, SingularSystemError,
                     SolutionBoundError)
from .stable import StableNoiseParams, compensator_drift, jump_coeffs

__all__ = [
    "MEAN_EXIT_TIME",
    "ESCAPE_LEFT",
    "Grid",
    "ExitProblem",
    "DenseSystem",
    "SolveResult",
    "RichardsonResult",
    "assemble_symmetric_part",
    "assemble_asymmetric_part",
    "assemble_local_part",
    "assemble",
    "solve_dense",
    "solve",
    "richardson_check",
]

MEAN_EXIT_TIME = "met"
ESCAPE_LEFT = "escape-left"

_SNAP_TOL = 1e-9


def _snap_index(value: float, h: float, what: str) -> int:
    scaled = value / h
    j = round(scaled)
    if abs(scaled - j) > _SNAP_TOL * max(1.0, abs(scaled)):
        raise ParameterError(
            f"h = {h} must divide {what} exactly; {what}/h = {scaled!r} is "
            f"{abs(scaled - j):.3e} steps away from an integer")
    return int(j)


@dataclass(frozen=True)
class Grid:
    """Uniform grid x_j = j h covering [a, b].

    h must divide a, b and the unit compensator radius; the interval must be
    longer than 1; and the midpoint (a+b)/2 must itself be a node.  These
    are exactly the assumptions the row assembly makes.
    """

    a: float
    b: float
    h: float
    left_index: int = field(init=False)
    right_index: int = field(init=False)
    mid_index: int = field(init=False)
    unit_steps: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "h", float(self.h))
        if not (math.isfinite(self.h) and self.h > 0.0):
            raise ParameterError(f"h must be positive, got {self.h}")
        if not (self.b - self.a > 1.0):
            raise ParameterError(
                f"domain length b - a = {self.b - self.a} must exceed the "
                f"unit compensator radius")
        ja = _snap_index(self.a, self.h, "a")
        jb = _snap_index(self.b, self.h, "b")
        m1 = _snap_index(1.0, self.h, "the unit compensator radius")
        if (ja + jb) % 2:
            raise ParameterError(
                f"midpoint (a+b)/2 must be a grid node; for h = {self.h} it "
                f"falls between nodes {ja} and {jb}")
        object.__setattr__(self, "left_index", ja)
        object.__setattr__(self, "right_index", jb)
        object.__setattr__(self, "mid_index", (ja + jb) // 2)
        object.__setattr__(self, "unit_steps", m1)

    @property
    def n_nodes(self) -> int:
        return self.right_index - self.left_index + 1

    @property
    def n_interior(self) -> int:
        return self.right_index - self.left_index - 1

    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n_nodes)

    def interior_nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(1, self.n_nodes - 1)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.a, self.b, self.h / int(factor))


@dataclass(frozen=True)
class ExitProblem:
    """What to solve: which quantity, on which grid, for which dynamics."""

    kind: str
    grid: Grid
    noise: StableNoiseParams
    drift: DriftField = ZeroDrift()

    def __post_init__(self):
        if self.kind not in (MEAN_EXIT_TIME, ESCAPE_LEFT):
            raise ParameterError(
                f"kind must be {MEAN_EXIT_TIME!r} or {ESCAPE_LEFT!r}, "
                f"got {self.kind!r}")


def _trap_range(k0: int, k1: int, punched: bool = False):
    """Nodes and trapezoid weights for the integral over [k0 h, k1 h].

    Zero or negative measure (k1 <= k0) yields empty arrays.  `punched`
    drops the k = 0 node, leaving the other weights untouched.
    """
    if k1 <= k0:
        return np.empty(0, dtype=np.intp), np.empty(0)
    ks = np.arange(k0, k1 + 1, dtype=np.intp)
    w = np.ones(ks.size)
    w[0] = 0.5
    w[-1] = 0.5
    if punched:
        keep = ks != 0
        ks, w = ks[keep], w[keep]
    return ks, w


def assemble_symmetric_part(grid: Grid, noise: StableNoiseParams) -> np.ndarray:
    """Rows of the symmetric half of the jump operator over all grid columns.

    Per row: a compensated window of radius equal to the distance to the
    nearer boundary (its centered-difference compensator cancels by symmetry
    but is kept literal), a trapezoid sum over the rest of the domain toward
    the farther boundary, and killing from the jump mass beyond [a, b].

    The punched-out cell (-h, h) is not simply dropped: its integral equals
    u''(x) h^(2-alpha)/(2-alpha) to leading order, and replacing the plain
    punched rule by that analytic value amounts to adding a centered second
    difference with weight alpha h^(-alpha) / (2 (2-alpha)).  Without this
    the window quadrature degrades to O(h^(2-alpha)), which is far too slow
    for alpha > 1.  Shape (n_interior, n_nodes); includes the strength
    factor c2.
    """
    alpha = noise.alpha
    c2 = jump_coeffs(noise).c2
    h = grid.h
    ja, jb, jm = grid.left_index, grid.right_index, grid.mid_index
    hole = alpha * h ** -alpha / (2.0 * (2.0 - alpha))
    rows = np.zeros((grid.n_interior, grid.n_nodes))
    for r, j in enumerate(range(ja + 1, jb)):
        row = rows[r]
        c = j - ja
        dl = j - ja
        dr = jb - j
        ks, w = _trap_range(-min(dl, dr), min(dl, dr), punched=True)
        coeff = h * w / np.abs(ks * h) ** (1.0 + alpha)
        row[c + ks] += coeff
        row[c] -= coeff.sum()
        comp = 0.5 * (coeff * ks).sum()
        row[c + 1] -= comp
        row[c - 1] += comp
        row[c + 1] += hole
        row[c - 1] += hole
        row[c] -= 2.0 * hole
        if j < jm:
            ks, w = _trap_range(dl, dr)
        else:
            ks, w = _trap_range(-dl, -dr)
        if ks.size:
            coeff = h * w / np.abs(ks * h) ** (1.0 + alpha)
            row[c + ks] += coeff
            row[c] -= coeff.sum()
        row[c] -= ((dl * h) ** -alpha + (dr * h) ** -alpha) / alpha
    rows *= c2
    return rows


def assemble_asymmetric_part(grid: Grid, noise: StableNoiseParams) -> np.ndarray:
    """Rows of the one-sided remainder of the jump operator.

    The jump measure minus its symmetric half is (c1 - c2) y^{-1-alpha} dy
    on y > 0.  Rows are built for a unit-strength right-side measure and
    scaled by (c1 - c2) at the end, so beta = 0 gives exact zeros.

    For alpha < 1 the one-sided integral converges without a compensator,
    and raw stable increments carry no centering, so the rows are a plain
    punched trapezoid out to the right boundary plus the analytic tail
    kill beyond it.  All off-diagonal entries then share one sign and the
    rows stay monotone for any drift.

    For alpha >= 1 the small-jump compensator is kept inside the unit
    radius; its derivative is taken one-sidedly, away from the heavier
    jump direction (forward when beta < 0, backward when beta >= 0), and
    the tail beyond the unit radius is centered through the drift shift
    in assemble_local_part.  At the single row next to a boundary the
    upwind difference would straddle exterior data, across which the
    solution jumps, so it is not a gradient estimate there.  For
    alpha > 1 the difference is taken from the interior side instead;
    the h^-alpha-sized jump couplings dominate it and keep the row
    monotone.  At alpha = 1 exactly those couplings are marginal and the
    interior-side difference flips the sign of a neighbour coefficient,
    so the compensator term is dropped at that one row instead (one
    O(h)-weight row with an O(1) defect costs O(h) overall).

    Shape (n_interior, n_nodes).
    """
    alpha = noise.alpha
    co = jump_coeffs(noise)
    h = grid.h
    ja, jb, m1 = grid.left_index, grid.right_index, grid.unit_steps
    rows = np.zeros((grid.n_interior, grid.n_nodes))
    if alpha < 1.0:
        for r, j in enumerate(range(ja + 1, jb)):
            row = rows[r]
            c = j - ja
            q = jb - j
            ks, w = _trap_range(0, q, punched=True)
            coeff = h * w / (ks * h) ** (1.0 + alpha)
            row[c + ks] += coeff
            row[c] -= coeff.sum()
            row[c] -= (q * h) ** -alpha / alpha
        rows *= co.c1 - co.c2
        return rows
    backward = noise.beta >= 0.0
    for r, j in enumerate(range(ja + 1, jb)):
        row = rows[r]
        c = j - ja
        q = jb - j
        straddles = (j == ja + 1) if backward else (j == jb - 1)
        use_backward = backward != straddles

        def add_delta(kc: float) -> None:
            if straddles and alpha == 1.0:
                return
            if use_backward:
                row[c] -= kc
                row[c - 1] += kc
            else:
                row[c + 1] -= kc
                row[c] += kc

        ks, w = _trap_range(0, min(q, m1), punched=True)
        coeff = h * w / (ks * h) ** (1.0 + alpha)
        row[c + ks] += coeff
        row[c] -= coeff.sum()
        add_delta((coeff * ks).sum())
        if q >= m1:
            ks, w = _trap_range(m1, q)
            if ks.size:
                coeff = h * w / (ks * h) ** (1.0 + alpha)
                row[c + ks] += coeff
                row[c] -= coeff.sum()
            row[c] -= (q * h) ** -alpha / alpha
        else:
            ks, w = _trap_range(q, m1)
            coeff = h * w / (ks * h) ** (1.0 + alpha)
            row[c] -= coeff.sum()
            add_delta((coeff * ks).sum())
            row[c] -= 1.0 / alpha
    rows *= co.c1 - co.c2
    return rows


def assemble_local_part(grid: Grid, noise: StableNoiseParams,
                        drift: DriftField) -> np.ndarray:
    """Rows of the drift and Brownian parts, by centered differences.

    For alpha >= 1 the drift field is shifted by -compensator_drift(noise):
    the jump rows generate the small-jump-compensated process, while the
    model equation is driven by raw stable increments, and the two differ
    by exactly that constant drift.  For alpha < 1 the jump rows already
    integrate against the raw measure, so no shift is applied.  No shift
    when beta = 0 either way.
    """
    h = grid.h
    n = grid.n_interior
    rows = np.zeros((n, grid.n_nodes))
    f = np.broadcast_to(np.asarray(drift(grid.interior_nodes()), dtype=float), (n,))
    if noise.alpha >= 1.0:
        f = f - compensator_drift(noise)
    idx = np.arange(n)
    c = idx + 1
    rows[idx, c + 1] += f / (2.0 * h)
    rows[idx, c - 1] -= f / (2.0 * h)
    if noise.d > 0.0:
        dd = noise.d / (2.0 * h * h)
        rows[idx, c + 1] += dd
        rows[idx, c - 1] += dd
        rows[idx, c] -= 2.0 * dd
    return rows


@dataclass(frozen=True)
class DenseSystem:
    """Folded linear system matrix @ u = rhs over the interior nodes.

    `source` is the escape problem's known inflow from jump mass landing
    beyond the left boundary, where p = 1 (zero for the mean exit time).
    It is already included in `rhs` and kept separate for inspection.
    `left_column` / `right_column` are the unfolded boundary columns; row r
    belongs to node grid.interior_nodes()[r].
    """

    kind: str
    grid: Grid
    matrix: np.ndarray
    rhs: np.ndarray
    source: np.ndarray
    left_column: np.ndarray
    right_column: np.ndarray


def assemble(problem: ExitProblem) -> DenseSystem:
    grid, noise = problem.grid, problem.noise
    full = (assemble_symmetric_part(grid, noise)
            + assemble_asymmetric_part(grid, noise)
            + assemble_local_part(grid, noise, problem.drift))
    matrix = np.ascontiguousarray(full[:, 1:-1])
    left_col = full[:, 0].copy()
    right_col = full[:, -1].copy()
    n = grid.n_interior
    if problem.kind == MEAN_EXIT_TIME:
        source = np.zeros(n)
        rhs = -np.ones(n)
    else:
        c2 = jump_coeffs(noise).c2
        dist = grid.h * np.arange(1, n + 1)
        source = -(c2 / noise.alpha) * dist ** -noise.alpha
        rhs = source - left_col
    return DenseSystem(kind=problem.kind, grid=grid, matrix=matrix, rhs=rhs,
                       source=source, left_column=left_col,
                       right_column=right_col)


@dataclass(frozen=True)
class SolveResult:
    """Solution over all nodes of [a, b], boundary values included."""

    kind: str
    xs: np.ndarray
    values: np.ndarray
    h: float
    residual: float
    rcond: float
    clamp_count: int

    def value_at(self, x: float) -> float:
        if not (self.xs[0] - 1e-12 <= x <= self.xs[-1] + 1e-12):
            raise ParameterError(
                f"x = {x} outside the solved interval "
                f"[{self.xs[0]}, {self.xs[-1]}]")
        return float(np.interp(x, self.xs, self.values))


def solve_dense(system: DenseSystem) -> SolveResult:
    a = system.matrix
    anorm = float(np.abs(a).sum(axis=1).max())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a)
    diag = np.abs(np.diag(lu))
    worst = int(np.argmin(diag))
    if not np.all(np.isfinite(lu)) or diag[worst] == 0.0:
        raise SingularSystemError(
            f"system matrix is singular (pivot {worst} is "
            f"{diag[worst]:.3e})", pivot_index=worst,
            pivot_value=float(diag[worst]))
    rcond, info = lapack.dgecon(lu, anorm, norm="I")
    rcond = float(rcond)
    if info != 0 or rcond < np.finfo(float).eps:
        raise SingularSystemError(
            f"system matrix is numerically singular "
            f"(reciprocal condition {rcond:.3e})", pivot_index=worst,
            pivot_value=float(diag[worst]))
    u = sla.lu_solve((lu, piv), system.rhs)
    residual = float(np.max(np.abs(a @ u - system.rhs)))
    if not np.all(np.isfinite(u)) or residual > 1e-6 * max(1.0, anorm):
        raise NumericalError(
            f"linear solve did not converge: residual {residual:.3e}")
    clamp_count = 0
    if system.kind == MEAN_EXIT_TIME:
        low = float(u.min())
        if low < -1e-8:
            raise SolutionBoundError(
                f"mean exit time reached {low:.3e}; the discretization is "
                f"not positivity-preserving at this resolution")
        mask = u < 0.0
        clamp_count = int(mask.sum())
        u = np.where(mask, 0.0, u)
        left_value = right_value = 0.0
    else:
        lo, hi = float(u.min()), float(u.max())
        if lo < -1e-3 or hi > 1.0 + 1e-3:
            raise SolutionBoundError(
                f"escape probability left [0, 1] by "
                f"{max(-lo, hi - 1.0):.3e}")
        mask = (u < 0.0) | (u > 1.0)
        clamp_count = int(mask.sum())
        u = np.clip(u, 0.0, 1.0)
        left_value, right_value = 1.0, 0.0
    values = np.concatenate(([left_value], u, [right_value]))
    return SolveResult(kind=system.kind, xs=system.grid.nodes(),
                       values=values, h=system.grid.h, residual=residual,
                       rcond=rcond, clamp_count=clamp_count)


def solve(problem: ExitProblem) -> SolveResult:
    return solve_dense(assemble(problem))


@dataclass(frozen=True)
class RichardsonResult:
    """Successive sup-norm differences under grid halving."""

    hs: tuple
    sup_diffs: tuple
    order_estimate: float


def richardson_check(problem: ExitProblem, levels: int = 3) -> RichardsonResult:
    """Solve on successively halved grids and compare on shared nodes.

    sup_diffs[i] = max over the level-i nodes of |u_i - u_{i+1}|; their
    decrease, with ratio about 2**order, is the standard self-consistency
    check for the dense scheme.
    """
    if levels < 2:
        raise ParameterError(f"need at least 2 levels, got {levels}")
    grids = [problem.grid]
    for _ in range(levels - 1):
        grids.append(grids[-1].refined())
    sols = [solve(ExitProblem(problem.kind, g, problem.noise, problem.drift))
            for g in grids]
    diffs = []
    for coarse, fine in zip(sols[:-1], sols[1:]):
        diffs.append(float(np.max(np.abs(coarse.values - fine.values[::2]))))
    if len(diffs) >= 2 and diffs[1] > 0.0:
        order = math.log2(diffs[0] / diffs[1])
    else:
        order = math.nan
    return RichardsonResult(hs=tuple(g.h for g in grids),
                            sup_diffs=tuple(diffs), order_estimate=order)
