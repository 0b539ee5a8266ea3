"""Result files: column data plus a flat metadata block, CSV or JSON.

Both formats carry the same content.  CSV opens with ``# key = value``
comment lines followed by a header row and data rows printed with 17
significant digits, which is enough to reconstruct every float64 exactly.
JSON stores ``{"metadata": ..., "columns": ...}`` and round-trips floats
bit-exactly through the shortest-repr serialization of :mod:`json`.

Files are written atomically (temp file in the target directory, then
rename), so an interrupted run never leaves a truncated result behind.
"""

from __future__ import annotations

import contextlib
import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

CSV = "csv"
JSON = "json"
FORMATS = (CSV, JSON)

_ROW_FORMAT = "%.17g"


@dataclass(frozen=True)
class ResultFile:
    """Parsed result: metadata mapping plus named float columns."""

    metadata: dict
    columns: dict

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise ParameterError(
                f"no column {name!r}; file has {sorted(self.columns)}"
            ) from None


def format_for(path: str, fmt: str | None = None) -> str:
    """Resolve the output format, from the explicit choice or the suffix."""
    if fmt is not None:
        if fmt not in FORMATS:
            raise ParameterError(
                f"format must be one of {FORMATS}, got {fmt!r}")
        return fmt
    ext = os.path.splitext(path)[1].lower().lstrip(".")
    return ext if ext in FORMATS else CSV


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        # newline="" so csv's own \r\n handling is not mangled on write
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _meta_text(value) -> str:
    if isinstance(value, bool):
        raise ParameterError(f"boolean metadata value {value!r} not supported")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    text = str(value)
    if "\n" in text or "\r" in text:
        raise ParameterError(f"metadata value {text!r} contains a newline")
    return text


def _meta_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _check_columns(columns: dict) -> dict:
    if not columns:
        raise ParameterError("result needs at least one column")
    out = {}
    length = None
    for name, values in columns.items():
        if "\n" in name or "\r" in name:
            raise ParameterError(f"column name {name!r} contains a newline")
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1:
            raise ParameterError(
                f"column {name!r} must be 1-dimensional, got shape "
                f"{arr.shape}")
        if length is None:
            length = arr.size
        elif arr.size != length:
            raise ParameterError(
                f"column {name!r} has {arr.size} rows, expected {length}")
        out[name] = arr
    return out


def write_result(path: str, metadata: dict, columns: dict,
                 fmt: str | None = None) -> None:
    """Write metadata plus columns to `path` atomically, CSV or JSON."""
    cols = _check_columns(columns)
    fmt = format_for(path, fmt)
    if fmt == JSON:
        payload = {
            "metadata": {k: _json_meta(v) for k, v in metadata.items()},
            "columns": {name: [_json_cell(v) for v in arr]
                        for name, arr in cols.items()},
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        for key, value in metadata.items():
            buf.write(f"# {key} = {_meta_text(value)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(cols))
        for row in zip(*cols.values()):
            writer.writerow([_ROW_FORMAT % v for v in row])
        text = buf.getvalue()
    _atomic_write_text(path, text)


def _json_meta(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _json_cell(float(value))
    return _meta_text(value)


def _json_cell(value: float):
    # json cannot carry IEEE specials portably; results never contain them
    if not math.isfinite(value):
        raise ParameterError(f"non-finite value {value!r} in result")
    return float(value)


def read_result(path: str) -> ResultFile:
    """Parse a file written by :func:`write_result`, either format."""
    with open(path, encoding="utf-8", newline="") as handle:
        text = handle.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        payload = json.loads(text)
        columns = {name: np.asarray(values, dtype=float)
                   for name, values in payload["columns"].items()}
        return ResultFile(metadata=dict(payload["metadata"]),
                          columns=columns)
    metadata = {}
    rows = []
    names = None
    for record in csv.reader(io.StringIO(text)):
        if not record:
            continue
        if record[0].startswith("# ") and names is None:
            line = ",".join(record)[2:]
            key, _, value = line.partition(" = ")
            metadata[key] = _meta_value(value)
            continue
        if names is None:
            names = record
        else:
            rows.append([float(cell) for cell in record])
    if names is None:
        raise ParameterError(f"{path} has no column header")
    data = np.asarray(rows, dtype=float).reshape(len(rows), len(names))
    columns = {name: data[:, i].copy() for i, name in enumerate(names)}
    return ResultFile(metadata=metadata, columns=columns)


def write_json(path: str, payload) -> None:
    """Atomic plain-JSON dump, used for sweep manifests."""
    _atomic_write_text(path, json.dumps(payload, indent=2) + "\n")
