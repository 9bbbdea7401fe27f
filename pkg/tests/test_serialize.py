"""Tests for deterministic artifact serialization."""

import json

import numpy as np
import pytest

from szwalk.serialize import (
    FLOAT_FORMAT,
    SCHEMA_VERSION,
    format_value,
    json_dumps,
    stamped,
    write_csv,
    write_json,
)


def test_format_value_floats_round_trip():
    values = [0.1, 1.0 / 3.0, 1e-300, 12345.6789, float(np.float64(2.0) ** -52)]
    for v in values:
        assert float(format_value(v)) == v


def test_format_value_specials():
    assert format_value(True) == "true"
    assert format_value(False) == "false"
    assert format_value(None) == ""
    assert format_value(7) == "7"
    assert format_value("abc") == "abc"


def test_format_value_matches_repr_precision():
    # %.17g is lossless for doubles
    x = 0.0011635528346628863
    assert format_value(x) == FLOAT_FORMAT % x
    assert float(format_value(x)) == x


def test_write_csv_and_content(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, ["a", "b"], [[1, 0.5], [2, True]])
    text = path.read_text()
    assert text == "a,b\n1,0.5\n2,true\n"


def test_write_csv_width_mismatch(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "bad.csv", ["a", "b"], [[1]])


def test_json_dumps_sorted_and_newline():
    s = json_dumps({"b": 1, "a": [2, 3]})
    assert s.endswith("\n")
    assert s.index('"a"') < s.index('"b"')
    assert json.loads(s) == {"b": 1, "a": [2, 3]}


def test_json_dumps_numpy_types():
    payload = {
        "f": np.float64(0.25),
        "i": np.int64(3),
        "arr": np.array([1.0, 2.0]),
        "flag": np.bool_(True),
    }
    decoded = json.loads(json_dumps(payload))
    assert decoded == {"f": 0.25, "i": 3, "arr": [1.0, 2.0], "flag": True}


def test_write_json_deterministic(tmp_path):
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    payload = {"z": 1.5, "a": {"k": np.float64(2.5)}}
    write_json(p1, payload)
    write_json(p2, payload)
    assert p1.read_bytes() == p2.read_bytes()


def test_stamped_adds_schema_and_config():
    out = stamped({"x": 1}, {"graph": "complete:3"})
    assert out["schema_version"] == SCHEMA_VERSION
    assert out["config"] == {"graph": "complete:3"}
    assert out["x"] == 1
