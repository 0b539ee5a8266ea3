"""Dense generator discretization: assembly identities, quadrature oracle,
closed-form exit times, solver guards."""

import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from levyexit.drift import TumorDrift, TumorParams, ZeroDrift
from levyexit.errors import (
    ParameterError,
    SingularSystemError,
    SolutionBoundError,
)
from levyexit.solver import (
    ESCAPE_LEFT,
    MEAN_EXIT_TIME,
    DenseSystem,
    ExitProblem,
    Grid,
    assemble,
    assemble_asymmetric_part,
    richardson_check,
    solve,
    solve_dense,
)
from levyexit.stable import StableNoiseParams, compensator_drift, jump_coeffs

TUMOR = TumorDrift(TumorParams(theta=0.1, gamma=3.0))


# --- grid -----------------------------------------------------------------


def test_grid_basic_layout():
    g = Grid(0.0, 5.0, 0.05)
    assert g.n_nodes == 101
    assert g.n_interior == 99
    assert g.unit_steps == 20
    assert g.mid_index - g.left_index == 50
    assert g.nodes()[0] == 0.0 and g.nodes()[-1] == 5.0
    assert np.array_equal(g.interior_nodes(), g.nodes()[1:-1])
    fine = g.refined()
    assert fine.h == 0.025 and fine.n_interior == 199


@pytest.mark.parametrize("a,b,h", [
    (0.0, 5.0, 0.0),         # h not positive
    (0.0, 5.0, -0.1),
    (0.0, 1.0, 0.05),        # domain not longer than the unit radius
    (0.0, 5.0, 0.3),         # h does not divide the unit radius
    (0.0, 5.0, 0.07),
    (0.3, 5.0, 0.2),         # boundaries off the lattice
])
def test_grid_rejects_bad_spacing(a, b, h):
    with pytest.raises(ParameterError):
        Grid(a, b, h)


def test_grid_midpoint_must_be_a_node():
    with pytest.raises(ParameterError, match="midpoint"):
        Grid(0.0, 3.0, 1.0)
    Grid(0.0, 4.0, 1.0)


def test_problem_kind_validation():
    g = Grid(0.0, 5.0, 0.5)
    with pytest.raises(ParameterError, match="kind"):
        ExitProblem("both", g, StableNoiseParams(1.5, 0.0, 0.0))


# --- assembly identities --------------------------------------------------


def test_beta_zero_has_no_asymmetric_rows():
    g = Grid(0.0, 5.0, 0.1)
    for alpha in (0.5, 1.0, 1.5):
        rows = assemble_asymmetric_part(g, StableNoiseParams(alpha, 0.0, 0.0))
        assert not np.any(rows)


@pytest.mark.parametrize("alpha,beta,d", [
    (0.5, 0.6, 0.0), (0.5, -0.6, 1.0), (1.0, 0.4, 0.0), (1.0, -1.0, 0.5),
    (1.5, 0.6, 0.0), (1.5, -0.6, 1.0), (1.9, 1.0, 0.0), (0.1, -1.0, 0.0),
])
def test_row_sums_encode_exact_tail_killing(alpha, beta, d):
    """Applying a row to the all-ones vector must leave exactly the
    negated jump mass beyond the domain, because every difference term
    cancels on constants.  Checked where both tails use the closed form
    (at least unit distance from the right boundary)."""
    g = Grid(0.0, 5.0, 0.05)
    noise = StableNoiseParams(alpha, beta, d)
    co = jump_coeffs(noise)
    system = assemble(ExitProblem(MEAN_EXIT_TIME, g, noise, TUMOR))
    sums = system.matrix.sum(axis=1) + system.left_column + system.right_column
    xs = g.interior_nodes()
    want = -(co.c1 * (5.0 - xs) ** -alpha + co.c2 * xs ** -alpha) / alpha
    keep = 5.0 - xs >= 1.0 - 1e-12
    scale = np.abs(want[keep]).max()
    assert np.max(np.abs(sums[keep] - want[keep])) < 1e-9 * scale
    assert np.all(sums[keep] < 0.0)


def _bump(x):
    return np.sin(np.pi * x / 5.0) ** 2


def _bump_prime(x):
    return (np.pi / 5.0) * math.sin(2.0 * np.pi * x / 5.0)


def _operator_by_quadrature(x, noise, drift):
    """Exact generator value on the bump extended by zero outside (0, 5).

    Uses the raw increment convention: uncompensated one-sided integrals
    below alpha = 1, fully compensated ones above (where the raw stable
    increments are mean-zero), drift applied as-is.
    """
    a = noise.alpha
    co = jump_coeffs(noise)
    u0 = float(_bump(x))
    du = _bump_prime(x)
    total = float(drift(x)) * du
    with warnings.catch_warnings():
        # quad flags roundoff-limited refinement near the singular end;
        # the convergence assertions below check the achieved accuracy
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for c, sign, reach in ((co.c1, 1.0, 5.0 - x), (co.c2, -1.0, x)):
            if c == 0.0:
                continue
            if a < 1.0:
                inner = integrate.quad(
                    lambda y: (float(_bump(x + sign * y)) - u0)
                    * y ** (-1.0 - a), 0, reach, limit=200)[0]
                tail = -u0 * reach ** -a / a
            else:
                inner = integrate.quad(
                    lambda y: (float(_bump(x + sign * y)) - u0
                               - sign * y * du)
                    * y ** (-1.0 - a), 0, reach, limit=200)[0]
                # beyond the boundary the bump is zero, leaving closed forms
                tail = (-u0 * reach ** -a / a
                        - sign * du * reach ** (1.0 - a) / (a - 1.0))
            total += c * (inner + tail)
    return total


@pytest.mark.parametrize("alpha,beta", [
    (0.5, 0.6), (0.5, -0.6), (1.5, 0.6), (1.5, -0.6),
])
def test_rows_converge_to_quadrature_oracle(alpha, beta):
    """Full assembled rows applied to a smooth bump approach the exact
    integro-differential operator under grid refinement."""
    noise = StableNoiseParams(alpha, beta, 0.0)
    points = [1.5, 2.5, 3.35]
    exact = np.array([_operator_by_quadrature(x, noise, TUMOR)
                      for x in points])
    errs = []
    for h in (0.05, 0.025, 0.0125):
        g = Grid(0.0, 5.0, h)
        system = assemble(ExitProblem(MEAN_EXIT_TIME, g, noise, TUMOR))
        u_interior = _bump(g.interior_nodes())
        applied = (system.matrix @ u_interior
                   + system.left_column * _bump(0.0)
                   + system.right_column * _bump(5.0))
        idx = [int(round(x / h)) - 1 for x in points]
        errs.append(np.abs(applied[idx] - exact).max())
    assert errs[0] < 0.2 * np.abs(exact).max()
    assert errs[1] < errs[0]
    assert errs[2] < errs[1]
    assert errs[2] < 0.8 * errs[0]


def test_system_structure_and_sources():
    g = Grid(0.0, 5.0, 0.25)
    noise = StableNoiseParams(1.3, 0.4, 0.2)
    met = assemble(ExitProblem(MEAN_EXIT_TIME, g, noise, TUMOR))
    n = g.n_interior
    assert met.matrix.shape == (n, n)
    assert np.array_equal(met.rhs, -np.ones(n))
    assert not np.any(met.source)

    esc = assemble(ExitProblem(ESCAPE_LEFT, g, noise, TUMOR))
    c2 = jump_coeffs(noise).c2
    dist = g.h * np.arange(1, n + 1)
    assert np.allclose(esc.source, -(c2 / 1.3) * dist ** -1.3, rtol=1e-14)
    assert np.array_equal(esc.rhs, esc.source - esc.left_column)
    # the jump parts of both systems coincide; only rhs differs
    assert np.array_equal(met.matrix, esc.matrix)


# --- independent symmetric reference (loop-based, scalar arithmetic) ------


def _symmetric_reference(grid, noise, drift):
    """Entry-by-entry rebuild of the beta = 0 operator from its definition:
    symmetric punched trapezoid window to the nearer boundary with the
    analytic replacement of the punched cell, one-sided trapezoid over the
    rest, closed-form killing, central drift and diffusion stencils."""
    a = noise.alpha
    h = grid.h
    half = 0.5 * jump_coeffs(noise).total
    assert jump_coeffs(noise).c1 == half and jump_coeffs(noise).c2 == half
    n_all = grid.n_nodes
    rows = np.zeros((grid.n_interior, n_all))
    hole = a * h ** -a / (2.0 * (2.0 - a))
    fs = drift(grid.interior_nodes())
    for r in range(grid.n_interior):
        c = r + 1
        dl, dr = c, n_all - 1 - c
        m = min(dl, dr)
        # symmetric window, both sides, trapezoid with endpoints halved
        for k in range(-m, m + 1):
            if k == 0:
                continue
            w = 0.5 if abs(k) == m else 1.0
            coeff = half * h * w / (abs(k) * h) ** (1.0 + a)
            rows[r, c + k] += coeff
            rows[r, c] -= coeff
        # analytic punched-cell replacement (second difference)
        rows[r, c - 1] += half * hole
        rows[r, c + 1] += half * hole
        rows[r, c] -= 2.0 * half * hole
        # remainder toward the farther boundary
        lo, hi = (m, max(dl, dr)) if dr >= dl else (-max(dl, dr), -m)
        if hi > lo:
            for k in range(lo, hi + 1):
                w = 0.5 if k in (lo, hi) else 1.0
                coeff = half * h * w / (abs(k) * h) ** (1.0 + a)
                rows[r, c + k] += coeff
                rows[r, c] -= coeff
        # closed-form kill beyond the domain
        rows[r, c] -= half * ((dl * h) ** -a + (dr * h) ** -a) / a
        # local part: central first difference and diffusion stencil
        f = fs[r] - (compensator_drift(noise) if a >= 1.0 else 0.0)
        rows[r, c + 1] += f / (2.0 * h) + noise.d / (2.0 * h * h)
        rows[r, c - 1] += -f / (2.0 * h) + noise.d / (2.0 * h * h)
        rows[r, c] -= noise.d / (h * h)
    return rows


@pytest.mark.parametrize("alpha,d", [(0.5, 0.0), (1.0, 1.0), (1.7, 0.4)])
def test_symmetric_case_matches_reference(alpha, d):
    g = Grid(0.0, 5.0, 0.1)
    noise = StableNoiseParams(alpha, 0.0, d)
    system = assemble(ExitProblem(MEAN_EXIT_TIME, g, noise, TUMOR))
    full = np.column_stack(
        [system.left_column, system.matrix, system.right_column])
    ref = _symmetric_reference(g, noise, TUMOR)
    scale = np.abs(ref).max()
    assert np.max(np.abs(full - ref)) < 1e-12 * scale


# --- closed-form ball exit ------------------------------------------------


def _ball_met(x, alpha, radius=1.0):
    return (math.sqrt(math.pi) * (radius ** 2 - x * x) ** (alpha / 2.0)
            / (2.0 ** alpha * math.gamma(1.0 + alpha / 2.0)
               * math.gamma((1.0 + alpha) / 2.0)))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_symmetric_ball_exit_closed_form(alpha):
    res = solve(ExitProblem(MEAN_EXIT_TIME, Grid(-1.0, 1.0, 0.01),
                            StableNoiseParams(alpha, 0.0, 0.0), ZeroDrift()))
    want = _ball_met(0.0, alpha)
    assert res.value_at(0.0) == pytest.approx(want, rel=0.01)


# --- solve results and guards --------------------------------------------


def test_escape_solution_shape_and_bounds():
    res = solve(ExitProblem(ESCAPE_LEFT, Grid(0.0, 5.0, 0.05),
                            StableNoiseParams(1.5, -0.5, 0.0), TUMOR))
    assert res.values[0] == 1.0 and res.values[-1] == 0.0
    assert np.all(res.values >= 0.0) and np.all(res.values <= 1.0)
    assert res.residual < 1e-8
    assert 0.0 < res.rcond <= 1.0


def test_met_solution_positive_with_zero_boundary():
    res = solve(ExitProblem(MEAN_EXIT_TIME, Grid(0.0, 5.0, 0.05),
                            StableNoiseParams(0.5, 0.5, 1.0), TUMOR))
    assert res.values[0] == 0.0 and res.values[-1] == 0.0
    assert np.all(res.values[1:-1] > 0.0)


def test_value_at_interpolates_and_guards_range():
    res = solve(ExitProblem(MEAN_EXIT_TIME, Grid(0.0, 5.0, 0.5),
                            StableNoiseParams(1.5, 0.0, 0.0), TUMOR))
    mid = 0.5 * (res.value_at(2.0) + res.value_at(2.5))
    assert res.value_at(2.25) == pytest.approx(mid, rel=1e-12)
    with pytest.raises(ParameterError):
        res.value_at(5.1)


def _toy_system(kind, rhs_value):
    g = Grid(0.0, 5.0, 0.5)
    n = g.n_interior
    return DenseSystem(kind=kind, grid=g, matrix=np.eye(n),
                       rhs=np.full(n, rhs_value), source=np.zeros(n),
                       left_column=np.zeros(n), right_column=np.zeros(n))


def test_singular_matrix_raises():
    system = _toy_system(MEAN_EXIT_TIME, 1.0)
    bad = DenseSystem(kind=system.kind, grid=system.grid,
                      matrix=np.zeros_like(system.matrix), rhs=system.rhs,
                      source=system.source, left_column=system.left_column,
                      right_column=system.right_column)
    with pytest.raises(SingularSystemError):
        solve_dense(bad)


def test_negative_exit_time_rejected():
    with pytest.raises(SolutionBoundError, match="exit time"):
        solve_dense(_toy_system(MEAN_EXIT_TIME, -1.0))


def test_probability_bound_rejected():
    with pytest.raises(SolutionBoundError, match="probability"):
        solve_dense(_toy_system(ESCAPE_LEFT, 2.0))


def test_richardson_reports_decreasing_differences():
    problem = ExitProblem(MEAN_EXIT_TIME, Grid(0.0, 5.0, 0.1),
                          StableNoiseParams(1.5, 0.3, 0.0), TUMOR)
    report = richardson_check(problem, levels=3)
    assert len(report.sup_diffs) == 2
    assert report.sup_diffs[1] < report.sup_diffs[0]
    assert report.hs == (0.1, 0.05, 0.025)
    with pytest.raises(ParameterError):
        richardson_check(problem, levels=1)
