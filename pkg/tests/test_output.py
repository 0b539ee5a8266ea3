"""Tests for result-file serialization and the atomic write discipline."""

import json
import math
import os

import numpy as np
import pytest

from levyexit import ParameterError
from levyexit.output import (
    CSV,
    JSON,
    ResultFile,
    format_for,
    read_result,
    write_json,
    write_result,
)

# values chosen to stress shortest-repr and %.17g round-tripping
AWKWARD = np.array([0.1, 1.0 / 3.0, -2.5e-17, 1.2345678901234567e308,
                    5e-324, -0.0, 7.0])


def test_format_resolution():
    assert format_for("a/b.csv") == CSV
    assert format_for("a/b.json") == JSON
    assert format_for("a/b.JSON") == JSON
    assert format_for("a/b.txt") == CSV
    assert format_for("noext") == CSV
    assert format_for("a/b.csv", "json") == JSON
    with pytest.raises(ParameterError, match="format"):
        format_for("a/b.csv", "yaml")


@pytest.mark.parametrize("fmt", [CSV, JSON])
def test_round_trip_is_bit_exact(tmp_path, fmt):
    path = str(tmp_path / f"out.{fmt}")
    meta = {"quantity": "met", "alpha": 0.1, "n": 42, "label": "x, y"}
    cols = {"x": AWKWARD, "u": AWKWARD[::-1].copy()}
    write_result(path, meta, cols, fmt)
    back = read_result(path)
    assert back.metadata == meta
    assert isinstance(back.metadata["n"], int)
    assert isinstance(back.metadata["alpha"], float)
    assert list(back.columns) == ["x", "u"]
    for name in cols:
        assert np.array_equal(back.column(name), cols[name])


def test_csv_layout_uses_seventeen_digits(tmp_path):
    path = str(tmp_path / "out.csv")
    write_result(path, {"alpha": 0.5}, {"x": [0.1], "u": [2.0]})
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0] == "# alpha = 0.5"
    assert lines[1] == "x,u"
    assert lines[2] == "0.10000000000000001,2"


def test_overwrite_is_atomic_and_leaves_no_temp_files(tmp_path):
    path = str(tmp_path / "out.json")
    write_result(path, {"k": 1}, {"x": [1.0]}, JSON)
    write_result(path, {"k": 2}, {"x": [2.0]}, JSON)
    assert read_result(path).metadata["k"] == 2
    assert os.listdir(tmp_path) == ["out.json"]


def test_failed_replace_cleans_up_and_keeps_target(tmp_path):
    target = tmp_path / "taken"
    target.mkdir()
    (target / "keep").write_text("x")
    with pytest.raises(OSError):
        write_result(str(target), {"k": 1}, {"x": [1.0]}, JSON)
    assert sorted(os.listdir(tmp_path)) == ["taken"]
    assert os.listdir(target) == ["keep"]


def test_write_creates_missing_directories(tmp_path):
    path = str(tmp_path / "deep" / "er" / "out.csv")
    write_result(path, {"k": 1}, {"x": [1.0]})
    assert read_result(path).metadata["k"] == 1


def test_metadata_value_with_commas_and_equals_survives_csv(tmp_path):
    path = str(tmp_path / "out.csv")
    meta = {"curve_values": "-1.0,-0.5,0.0,0.5,1.0", "note": "a = b, c"}
    write_result(path, meta, {"x": [1.0]})
    assert read_result(path).metadata == meta


def test_column_validation():
    with pytest.raises(ParameterError, match="at least one column"):
        write_result("unused.csv", {}, {})
    with pytest.raises(ParameterError, match="rows, expected"):
        write_result("unused.csv", {}, {"x": [1.0, 2.0], "u": [1.0]})
    with pytest.raises(ParameterError, match="1-dimensional"):
        write_result("unused.csv", {}, {"x": [[1.0], [2.0]]})
    with pytest.raises(ParameterError, match="newline"):
        write_result("unused.csv", {}, {"x\n": [1.0]})


def test_metadata_validation(tmp_path):
    path = str(tmp_path / "out.csv")
    with pytest.raises(ParameterError, match="boolean"):
        write_result(path, {"flag": True}, {"x": [1.0]})
    with pytest.raises(ParameterError, match="newline"):
        write_result(path, {"note": "a\nb"}, {"x": [1.0]})
    with pytest.raises(ParameterError, match="boolean"):
        write_result(path, {"flag": False}, {"x": [1.0]}, JSON)


def test_json_rejects_non_finite_cells(tmp_path):
    path = str(tmp_path / "out.json")
    with pytest.raises(ParameterError, match="non-finite"):
        write_result(path, {}, {"x": [math.inf]}, JSON)
    with pytest.raises(ParameterError, match="non-finite"):
        write_result(path, {"bad": math.nan}, {"x": [1.0]}, JSON)
    assert not os.path.exists(path)


def test_read_rejects_headerless_csv(tmp_path):
    path = tmp_path / "meta_only.csv"
    path.write_text("# alpha = 0.5\n")
    with pytest.raises(ParameterError, match="no column header"):
        read_result(str(path))


def test_missing_column_accessor_names_alternatives():
    rf = ResultFile(metadata={}, columns={"x": np.array([1.0])})
    with pytest.raises(ParameterError, match="no column 'u'"):
        rf.column("u")


def test_manifest_helper_round_trips(tmp_path):
    path = str(tmp_path / "manifest.json")
    payload = {"files": {"met_alpha=0.5.csv": {"alpha": 0.5}}}
    write_json(path, payload)
    with open(path, encoding="utf-8") as handle:
        assert json.load(handle) == payload
    assert os.listdir(tmp_path) == ["manifest.json"]
