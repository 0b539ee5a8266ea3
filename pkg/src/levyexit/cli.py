"""Command line front end.

Five subcommands share one flag surface:

* ``met``      mean exit time curve over the interior grid nodes
* ``escape``   probability of leaving through the left boundary
* ``sweep``    families of curves over alpha/beta/d grids, one file per
               parameter tuple plus a JSON manifest
* ``pdf``      table of the driving noise density
* ``simulate`` Monte Carlo exit statistics from Euler paths

Configuration precedence, lowest to highest: built-in defaults, then
``--preset``, then ``--config`` (a flat ``key = value`` text file, ``#``
comments allowed, comma-separated lists for the sweep axes), then explicit
flags.  Exit status is 0 on success, 2 for invalid parameters, 3 when a
computation fails numerically.

Every result file carries its inputs in the metadata block;
:func:`replay` recomputes a file from that block alone, which is the
reproducibility contract the tests enforce.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .drift import TumorDrift, TumorParams
from .errors import NumericalError, ParameterError
from .mc import SimConfig, simulate_exit
from .output import (
    CSV,
    FORMATS,
    ResultFile,
    format_for,
    read_result,
    write_json,
    write_result,
)
from .presets import preset
from .solver import ESCAPE_LEFT, MEAN_EXIT_TIME, ExitProblem, Grid, solve
from .stable import StableNoiseParams, gaussian_limit_pdf, stable_pdf

COMMANDS = ("met", "escape", "sweep", "pdf", "simulate")
QUANTITIES = ("met", "escape", "pdf")

_DEFAULTS = {
    "quantity": "met",
    "alpha": 1.9,
    "beta": 0.0,
    "d": 0.0,
    "theta": 0.1,
    "gamma": 3.0,
    "a": 0.0,
    "b": 5.0,
    "h": 0.05,
    "x0": 2.5,
    "paths": 100_000,
    "dt": 1e-3,
    "seed": 0,
    "max_steps": 10_000_000,
    "alphas": None,
    "betas": None,
    "ds": None,
    "curve_axis": "beta",
    "output": None,
    "format": None,
}

_FLOAT_KEYS = ("alpha", "beta", "d", "theta", "gamma", "a", "b", "h",
               "x0", "dt")
_INT_KEYS = ("paths", "seed", "max_steps")
_LIST_KEYS = ("alphas", "betas", "ds")
_STR_KEYS = ("quantity", "curve_axis", "output", "format")

_VALUE_COLUMN = {"met": "u", "escape": "p", "pdf": "pdf"}
_KIND = {"met": MEAN_EXIT_TIME, "escape": ESCAPE_LEFT}


def _as_float(key: str, value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ParameterError(
            f"{key} must be a number, got {value!r}") from None
    return out


def _as_int(key: str, value) -> int:
    if isinstance(value, bool):
        raise ParameterError(f"{key} must be an integer, got {value!r}")
    if isinstance(value, (int, np.integer)):
        return int(value)
    try:
        return int(str(value).strip())
    except ValueError:
        raise ParameterError(
            f"{key} must be an integer, got {value!r}") from None


def _as_list(key: str, value):
    if value is None:
        return None
    if isinstance(value, (tuple, list)):
        items = list(value)
    else:
        items = [tok for tok in str(value).split(",")]
    if not items or any(str(tok).strip() == "" for tok in items):
        raise ParameterError(
            f"{key} must be a non-empty comma-separated list, got {value!r}")
    return tuple(_as_float(key, tok) for tok in items)


@dataclass(frozen=True)
class RunConfig:
    """Fully coerced run settings, shared by every subcommand.

    The scalar fields drive single runs; the optional ``alphas`` /
    ``betas`` / ``ds`` tuples are the sweep axes, with ``curve_axis``
    naming the axis stored as columns inside each file (the others index
    the files).  ``validate`` constructs every downstream object a run
    would need, so a config that passes cannot fail later for parameter
    reasons.
    """

    quantity: str
    alpha: float
    beta: float
    d: float
    theta: float
    gamma: float
    a: float
    b: float
    h: float
    x0: float
    paths: int
    dt: float
    seed: int
    max_steps: int
    alphas: tuple | None
    betas: tuple | None
    ds: tuple | None
    curve_axis: str
    output: str | None
    fmt: str | None

    def axis(self, name: str) -> tuple:
        """Sweep values for one axis, falling back to the scalar."""
        values = getattr(self, name + "s")
        return values if values is not None else (getattr(self, name),)

    def validate(self, command: str) -> None:
        if command in ("met", "escape"):
            _solver_pieces(self, self.alpha, self.beta, self.d)
        elif command == "pdf":
            _pdf_window(self)
            _pdf_noise(self.alpha, self.beta, self.d)
        elif command == "simulate":
            noise = StableNoiseParams(self.alpha, self.beta, self.d)
            cfg = _sim_config(self)
            if not self.a < self.x0 < self.b:
                raise ParameterError(
                    f"x0 must lie inside ({self.a}, {self.b}), "
                    f"got {self.x0}")
            del noise, cfg
        elif command == "sweep":
            if self.alphas is None and self.betas is None and self.ds is None:
                raise ParameterError(
                    "sweep needs at least one of alphas, betas, ds; set "
                    "them with --preset or in a config file")
            if self.quantity not in QUANTITIES:
                raise ParameterError(
                    f"quantity must be one of {QUANTITIES}, "
                    f"got {self.quantity!r}")
            if self.quantity == "pdf":
                _pdf_window(self)
            for alpha, beta, d in itertools.product(
                    self.axis("alpha"), self.axis("beta"), self.axis("d")):
                if self.quantity == "pdf":
                    _pdf_noise(alpha, beta, d)
                else:
                    _solver_pieces(self, alpha, beta, d)
        else:
            raise ParameterError(f"unknown command {command!r}")


def config_from_values(values: dict) -> RunConfig:
    """Coerce a raw key-value mapping into a validated-shape RunConfig."""
    unknown = sorted(set(values) - set(_DEFAULTS))
    if unknown:
        raise ParameterError(
            f"unknown configuration key(s) {', '.join(unknown)}; known "
            f"keys: {', '.join(sorted(_DEFAULTS))}")
    merged = {**_DEFAULTS, **values}
    coerced = {}
    for key in _FLOAT_KEYS:
        coerced[key] = _as_float(key, merged[key])
    for key in _INT_KEYS:
        coerced[key] = _as_int(key, merged[key])
    for key in _LIST_KEYS:
        coerced[key] = _as_list(key, merged[key])
    for key in _STR_KEYS:
        value = merged[key]
        coerced[key] = None if value is None else str(value)
    if coerced["curve_axis"] not in ("alpha", "beta"):
        raise ParameterError(
            f"curve_axis must be 'alpha' or 'beta', "
            f"got {coerced['curve_axis']!r}")
    fmt = coerced.pop("format")
    if fmt is not None and fmt not in FORMATS:
        raise ParameterError(f"format must be one of {FORMATS}, got {fmt!r}")
    return RunConfig(fmt=fmt, **coerced)


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` comments and blank lines skipped."""
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path}: {exc}") from exc
    mapping = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(
                f"{path}:{lineno}: expected 'key = value', got {line!r}")
        mapping[key.strip()] = value.strip()
    return mapping


# --- the individual computations, shared by direct runs and replay -------


def _solver_pieces(cfg: RunConfig, alpha: float, beta: float, d: float):
    noise = StableNoiseParams(alpha, beta, d)
    grid = Grid(cfg.a, cfg.b, cfg.h)
    drift = TumorDrift(TumorParams(theta=cfg.theta, gamma=cfg.gamma))
    return noise, grid, drift


def _pdf_noise(alpha: float, beta: float, d: float):
    """pdf-specific parameter checks; alpha = 2 means the Gaussian limit."""
    if d != 0.0:
        raise ParameterError(
            f"pdf tabulates the pure jump noise and needs d = 0, got d = {d}")
    if alpha == 2.0:
        if not -1.0 <= beta <= 1.0:
            raise ParameterError(f"beta must lie in [-1, 1], got {beta}")
        return None
    return StableNoiseParams(alpha, beta, 0.0)


def _pdf_window(cfg: RunConfig) -> np.ndarray:
    if not cfg.h > 0.0:
        raise ParameterError(f"h must be positive, got {cfg.h}")
    if not cfg.b > cfg.a:
        raise ParameterError(
            f"window needs a < b, got ({cfg.a}, {cfg.b})")
    span = cfg.b - cfg.a
    count = round(span / cfg.h)
    if count < 1 or abs(count * cfg.h - span) > 1e-9 * max(1.0, span):
        raise ParameterError(
            f"h = {cfg.h} must divide the window length b - a = {span}")
    return cfg.a + cfg.h * np.arange(count + 1)


def _sim_config(cfg: RunConfig) -> SimConfig:
    return SimConfig(dt=cfg.dt, n_paths=cfg.paths, max_steps=cfg.max_steps,
                     seed=cfg.seed)


def _solve_curve(cfg: RunConfig, quantity: str, alpha: float, beta: float,
                 d: float):
    """One solver run; returns interior xs, values, diagnostics."""
    noise, grid, drift = _solver_pieces(cfg, alpha, beta, d)
    result = solve(ExitProblem(_KIND[quantity], grid, noise, drift))
    diag = {"residual": result.residual, "rcond": result.rcond,
            "clamp_count": result.clamp_count}
    return result.xs[1:-1], result.values[1:-1], diag


def _pdf_curve(cfg: RunConfig, alpha: float, beta: float, d: float):
    xs = _pdf_window(cfg)
    noise = _pdf_noise(alpha, beta, d)
    if noise is None:
        return xs, gaussian_limit_pdf(xs), {
            "density_source": "gaussian-limit", "quad_error": 0.0,
            "clamp_count": 0}
    res = stable_pdf(xs, noise)
    return xs, res.values, {
        "density_source": "fourier-inversion",
        "quad_error": res.error_estimate, "clamp_count": res.clamp_count,
        "n_nodes": res.n_nodes, "lambda_max": res.lambda_max}


def _curve(cfg: RunConfig, quantity: str, alpha: float, beta: float,
           d: float):
    if quantity == "pdf":
        return _pdf_curve(cfg, alpha, beta, d)
    return _solve_curve(cfg, quantity, alpha, beta, d)


def _input_meta(command: str, cfg: RunConfig, keys) -> dict:
    meta = {"command": command, "version": __version__}
    for key in keys:
        meta[key] = getattr(cfg, key)
    return meta


_SINGLE_KEYS = {
    "met": ("alpha", "beta", "d", "theta", "gamma", "a", "b", "h"),
    "escape": ("alpha", "beta", "d", "theta", "gamma", "a", "b", "h"),
    "pdf": ("alpha", "beta", "d", "a", "b", "h"),
    "simulate": ("alpha", "beta", "d", "theta", "gamma", "a", "b", "x0",
                 "dt", "paths", "max_steps", "seed"),
}


def _single_result(command: str, cfg: RunConfig):
    meta = _input_meta(command, cfg, _SINGLE_KEYS[command])
    if command == "simulate":
        noise = StableNoiseParams(cfg.alpha, cfg.beta, cfg.d)
        drift = TumorDrift(TumorParams(theta=cfg.theta, gamma=cfg.gamma))
        stats = simulate_exit(cfg.x0, (cfg.a, cfg.b), drift, noise,
                              _sim_config(cfg))
        columns = {
            "met_mean": [stats.met_mean],
            "met_stderr": [stats.met_stderr],
            "p_left": [stats.p_left],
            "p_left_stderr": [stats.p_left_stderr],
            "p_right": [stats.p_right],
            "n_paths": [float(stats.n_paths)],
            "n_censored": [float(stats.n_censored)],
        }
        return meta, columns
    xs, values, diag = _curve(cfg, command, cfg.alpha, cfg.beta, cfg.d)
    meta.update(diag)
    columns = {"x": xs, _VALUE_COLUMN[command]: values}
    return meta, columns


def _curve_label(axis: str, value: float) -> str:
    return f"{axis}={value:g}"


def _sweep_file(cfg: RunConfig, quantity: str, alpha: float, beta: float,
                d: float):
    """All curves of one sweep file; the curve axis overrides its scalar."""
    base = _VALUE_COLUMN[quantity]
    columns = {}
    xs_ref = None
    worst = {}
    for value in cfg.axis(cfg.curve_axis):
        ca, cb = (value, beta) if cfg.curve_axis == "alpha" else (alpha, value)
        xs, values, diag = _curve(cfg, quantity, ca, cb, d)
        if xs_ref is None:
            xs_ref = xs
            columns["x"] = xs
        name = f"{base}({_curve_label(cfg.curve_axis, value)})"
        if name in columns:
            raise ParameterError(
                f"curve values collide on label {name!r}; thin the "
                f"{cfg.curve_axis} list")
        columns[name] = values
        for key, val in diag.items():
            if isinstance(val, (int, float)) and key != "lambda_max":
                worst[key] = _merge_diag(key, worst.get(key), val)
    meta_extra = {f"max_{k}" if k in ("residual", "quad_error") else
                  f"min_{k}" if k == "rcond" else k: v
                  for k, v in worst.items()}
    return columns, meta_extra


def _merge_diag(key: str, current, value):
    if current is None:
        return value
    if key == "rcond":
        return min(current, value)
    if key == "clamp_count":
        return current + value
    return max(current, value)


_SWEEP_KEYS = {
    "met": ("theta", "gamma", "a", "b", "h"),
    "escape": ("theta", "gamma", "a", "b", "h"),
    "pdf": ("a", "b", "h"),
}


def _run_sweep(cfg: RunConfig, out_dir: str, fmt: str,
               preset_name: str | None):
    cfg.validate("sweep")
    quantity = cfg.quantity
    curve_values = cfg.axis(cfg.curve_axis)
    outer_axes = tuple(ax for ax in ("alpha", "beta", "d")
                       if ax != cfg.curve_axis)
    written = []
    files = {}
    for combo in itertools.product(*(cfg.axis(ax) for ax in outer_axes)):
        labels = [_curve_label(ax, v) for ax, v in zip(outer_axes, combo)]
        label = ",".join(labels)
        filename = f"{quantity}_{'_'.join(labels)}.{fmt}"
        if label in files:
            raise ParameterError(
                f"sweep tuples collide on {label!r}; thin the axis lists")
        scalars = dict(zip(outer_axes, combo))
        try:
            columns, diag = _sweep_file(
                cfg, quantity, scalars.get("alpha", cfg.alpha),
                scalars.get("beta", cfg.beta), scalars.get("d", cfg.d))
        except ParameterError as exc:
            raise ParameterError(
                f"sweep aborted at ({label}): {exc}") from exc
        except NumericalError as exc:
            raise NumericalError(
                f"sweep aborted at ({label}): {exc}") from exc
        meta = {"command": "sweep", "version": __version__,
                "quantity": quantity, "curve_axis": cfg.curve_axis,
                "curve_values": ",".join(repr(v) for v in curve_values)}
        meta.update(scalars)
        for key in _SWEEP_KEYS[quantity]:
            meta[key] = getattr(cfg, key)
        meta.update(diag)
        path = os.path.join(out_dir, filename)
        write_result(path, meta, columns, fmt)
        files[label] = filename
        written.append(path)
    manifest = {
        "command": "sweep",
        "version": __version__,
        "preset": preset_name,
        "quantity": quantity,
        "curve_axis": cfg.curve_axis,
        "curve_values": list(curve_values),
        "format": fmt,
        "files": files,
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    write_json(manifest_path, manifest)
    written.append(manifest_path)
    return written


# --- replay: recompute a result file from its own metadata ---------------


def replay(path: str) -> ResultFile:
    """Re-run the computation recorded in a result file's metadata.

    Returns a fresh ResultFile with the recomputed columns; comparing it
    against the stored one checks that the metadata block is a complete
    record of the run.
    """
    stored = read_result(path)
    meta = stored.metadata
    command = str(meta.get("command", ""))
    values = {}
    for key in (*_FLOAT_KEYS, *_INT_KEYS, "quantity", "curve_axis"):
        if key in meta:
            values[key] = meta[key]
    if command == "sweep":
        curve = str(meta.get("curve_axis", ""))
        if curve not in ("alpha", "beta"):
            raise ParameterError(
                f"{path}: bad curve_axis {curve!r} in metadata")
        values[curve + "s"] = str(meta["curve_values"])
        cfg = config_from_values(values)
        columns, _ = _sweep_file(cfg, cfg.quantity, cfg.alpha, cfg.beta,
                                 cfg.d)
    elif command in ("met", "escape", "pdf", "simulate"):
        cfg = config_from_values(values)
        cfg.validate(command)
        _, columns = _single_result(command, cfg)
    else:
        raise ParameterError(
            f"{path}: metadata names no replayable command "
            f"(command = {command!r})")
    columns = {name: np.asarray(vals, dtype=float)
               for name, vals in columns.items()}
    return ResultFile(metadata=dict(meta), columns=columns)


# --- argument parsing and dispatch ---------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levyexit",
        description="Exit times and escape probabilities for scalar "
                    "dynamics driven by asymmetric stable noise.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    arg = common.add_argument
    arg("--alpha", type=float, help="stability index in (0, 2); "
        "pdf also accepts the Gaussian limit 2")
    arg("--beta", type=float, help="skewness in [-1, 1]")
    arg("--d", type=float, help="diffusion coefficient of the Brownian "
        "part, >= 0")
    arg("--theta", type=float, help="immune threshold parameter, in (0, 1)")
    arg("--gamma", type=float, help="immune strength parameter, in "
        "(0, (1+theta)^2 / (4 theta))")
    arg("--a", type=float, help="left boundary (pdf: window start)")
    arg("--b", type=float, help="right boundary (pdf: window end)")
    arg("--h", type=float, help="grid spacing (pdf: table spacing)")
    arg("--x0", type=float, help="simulate: starting state, inside (a, b)")
    arg("--paths", type=int, help="simulate: number of sample paths")
    arg("--dt", type=float, help="simulate: Euler time step")
    arg("--seed", type=int, help="simulate: base seed of the per-path "
        "random streams")
    arg("--preset", metavar="NAME",
        help="named figure configuration (fig1, fig3..fig12)")
    arg("--config", metavar="FILE",
        help="flat 'key = value' configuration file")
    arg("--output", metavar="PATH",
        help="result file (sweep: output directory)")
    arg("--format", choices=FORMATS, dest="format",
        help="result format; default csv, or inferred from --output")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")
    descriptions = {
        "met": "mean exit time from (a, b), tabulated on the interior "
               "grid nodes",
        "escape": "probability of exiting (a, b) through the left "
                  "boundary",
        "sweep": "families of met/escape/pdf curves over alpha/beta/d "
                 "lists, one file per parameter tuple plus a manifest",
        "pdf": "density table of the stable jump noise",
        "simulate": "Monte Carlo exit statistics from Euler sample paths",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=descriptions[name],
                       description=descriptions[name])
    return parser


def _gather_values(args: argparse.Namespace) -> dict:
    values = {}
    if args.preset is not None:
        values.update(preset(args.preset))
    if args.config is not None:
        values.update(parse_config_file(args.config))
    for key in (*_FLOAT_KEYS, *_INT_KEYS):
        if key in ("max_steps",):
            continue
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if args.output is not None:
        values["output"] = args.output
    if args.format is not None:
        values["format"] = args.format
    return values


def _resolve_output(command: str, cfg: RunConfig,
                    preset_name: str | None) -> tuple:
    if command == "sweep":
        out = cfg.output if cfg.output else (preset_name or "sweep")
        return out, (cfg.fmt or CSV)
    if cfg.output:
        return cfg.output, format_for(cfg.output, cfg.fmt)
    fmt = cfg.fmt or CSV
    return f"{command}.{fmt}", fmt


def run(args: argparse.Namespace):
    """Execute one parsed invocation; returns the list of files written."""
    cfg = config_from_values(_gather_values(args))
    command = args.command
    out, fmt = _resolve_output(command, cfg, args.preset)
    if command == "sweep":
        return _run_sweep(cfg, out, fmt, args.preset)
    cfg.validate(command)
    meta, columns = _single_result(command, cfg)
    write_result(out, meta, columns, fmt)
    return [out]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        for path in run(args):
            print(f"wrote {path}")
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
