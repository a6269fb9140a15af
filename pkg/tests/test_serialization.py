import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vaxjo.errors import SchemaError
from vaxjo.serialization import csv_text, dumps, fmt_float, read_json, write_json


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_roundtrip(x):
    assert float(fmt_float(x)) == x


def test_seventeen_digits():
    assert fmt_float(0.1) == "0.10000000000000001"
    assert fmt_float(1.0) == "1"


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        fmt_float(math.nan)


def test_dumps_is_valid_sorted_json():
    text = dumps({"b": [1.5, np.float64(0.1)], "a": {"z": True, "y": None}, "c": np.array([[1, 2], [3, 4]])})
    doc = json.loads(text)
    assert list(doc) == ["a", "b", "c"]
    assert doc["b"][1] == 0.1
    assert doc["c"] == [[1, 2], [3, 4]]


def test_dumps_uses_to_dict():
    class Thing:
        def to_dict(self):
            return {"x": 0.25}

    assert json.loads(dumps(Thing())) == {"x": 0.25}


def test_read_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(SchemaError):
        read_json(bad)
    with pytest.raises(SchemaError):
        read_json(tmp_path / "missing.json")


def test_write_read_roundtrip(tmp_path):
    path = tmp_path / "x.json"
    write_json(path, {"v": [1 / 3, 2 / 3]})
    assert read_json(path) == {"v": [1 / 3, 2 / 3]}


def test_csv_text():
    assert csv_text(("a", "b"), [(1, 0.5), ("x", 1 / 3)]) == "a,b\n1,0.5\nx,0.33333333333333331\n"
