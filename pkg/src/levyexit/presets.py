"""Named sweep configurations for the standard figure datasets.

Each preset is a flat mapping using the same keys as the config file, so
the usual precedence rules apply on top (preset < config file < flags).
The stability and skewness grids follow the published panel layouts; where
a panel family fixes one axis, the grid chosen for the other axis is a
repo decision and is recorded here:

* per-index panels sweep beta over {-1, -0.5, 0, 0.5, 1};
* per-skewness panels sweep alpha over {0.1, 0.5, 1.0, 1.5, 1.9};
* the surface datasets use beta in steps of 0.1 (``fig11``) and alpha in
  steps of 0.1 from 0.1 to 1.9 (``fig12``).

``fig1`` (density panels) omits alpha = 0.1: the Fourier inversion cannot
certify plot-grade accuracy that deep in the heavy-tail regime, and the
quadrature refuses to return uncertified values.  ``fig2`` is the
deterministic potential landscape, which has a closed form and no solver
run behind it, so it is deliberately not a preset.
"""

from __future__ import annotations

from .errors import ParameterError

_BETA_PANEL = "-1,-0.5,0,0.5,1"
_ALPHA_CURVES = "0.1,0.5,1.0,1.5,1.9"
_BETA_DENSE = ",".join(f"{(k - 10) / 10:.1f}" for k in range(21))
_ALPHA_DENSE = ",".join(f"{0.1 * k:.1f}" for k in range(1, 20))

PRESETS = {
    "fig1": {
        "quantity": "pdf",
        "alphas": "0.5,1.0,1.5,1.9,2.0",
        "betas": _BETA_PANEL,
        "curve_axis": "beta",
        "a": -10.0,
        "b": 10.0,
        "h": 0.05,
        "d": 0.0,
    },
    "fig3": {
        "quantity": "met",
        "alphas": "0.1,0.5,1.0,1.5,1.77,1.9",
        "betas": _BETA_PANEL,
        "curve_axis": "beta",
        "d": 0.0,
    },
    "fig4": {
        "quantity": "met",
        "alphas": _ALPHA_CURVES,
        "betas": _BETA_PANEL,
        "curve_axis": "beta",
        "d": 1.0,
    },
    "fig5": {
        "quantity": "met",
        "alphas": _ALPHA_CURVES,
        "betas": _BETA_PANEL,
        "curve_axis": "alpha",
        "d": 0.0,
    },
    "fig6": {
        "quantity": "met",
        "alphas": _ALPHA_CURVES,
        "betas": _BETA_PANEL,
        "curve_axis": "alpha",
        "d": 1.0,
    },
    "fig7": {
        "quantity": "escape",
        "alphas": _ALPHA_CURVES,
        "betas": _BETA_PANEL,
        "curve_axis": "beta",
        "d": 0.0,
    },
    "fig8": {
        "quantity": "escape",
        "alphas": _ALPHA_CURVES,
        "betas": _BETA_PANEL,
        "curve_axis": "beta",
        "d": 1.0,
    },
    "fig9": {
        "quantity": "escape",
        "alphas": _ALPHA_CURVES,
        "betas": _BETA_PANEL,
        "curve_axis": "alpha",
        "d": 0.0,
    },
    "fig10": {
        "quantity": "escape",
        "alphas": _ALPHA_CURVES,
        "betas": _BETA_PANEL,
        "curve_axis": "alpha",
        "d": 1.0,
    },
    "fig11": {
        "quantity": "met",
        "alphas": "0.1",
        "betas": _BETA_DENSE,
        "ds": "0,1",
        "curve_axis": "beta",
    },
    "fig12": {
        "quantity": "escape",
        "alphas": _ALPHA_DENSE,
        "betas": "-1",
        "ds": "0,1",
        "curve_axis": "alpha",
    },
}


def preset(name: str) -> dict:
    """Look up a preset by name; the returned dict is a fresh copy."""
    if name == "fig2":
        raise ParameterError(
            "fig2 is the potential landscape U(x), a closed-form curve "
            "with no solver run behind it; evaluate "
            "levyexit.drift.potential directly instead")
    try:
        return dict(PRESETS[name])
    except KeyError:
        known = ", ".join(sorted(PRESETS, key=_preset_order))
        raise ParameterError(
            f"unknown preset {name!r}; available: {known}") from None


def _preset_order(name: str) -> int:
    return int(name.removeprefix("fig"))
