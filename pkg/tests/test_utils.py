import io
from fractions import Fraction

import numpy as np
import pytest

from coopic.utils import int_range, optional_int, pos, str2bool, to_jsonable, write_csv


@pytest.mark.parametrize("string,expected", [("True", True), ("False", False)])
def test_str2bool(string, expected):
    assert str2bool(string) is expected


def test_str2bool_rejects_other_strings():
    with pytest.raises(ValueError):
        str2bool("false")


def test_optional_int():
    assert optional_int("None") is None
    assert optional_int("4") == 4


@pytest.mark.parametrize("string,expected", [("0..3", range(0, 4)), ("2..2", range(2, 3)), ("5", range(0, 6))])
def test_int_range(string, expected):
    assert int_range(string) == expected


@pytest.mark.parametrize("string", ["a..b", "3..1", "-1..2", ""])
def test_int_range_rejects(string):
    with pytest.raises(ValueError):
        int_range(string)


def test_pos_keeps_type():
    assert pos(-3) == 0 and isinstance(pos(-3), int)
    assert pos(Fraction(-1, 2)) == 0 and isinstance(pos(Fraction(-1, 2)), Fraction)
    assert pos(2.5) == 2.5


def test_to_jsonable():
    document = {1: [Fraction(3, 2), Fraction(4, 1)], "x": (np.int64(2), np.float64(0.5))}
    assert to_jsonable(document) == {"1": ["3/2", 4], "x": [2, 0.5]}


def test_write_csv_round_trips_floats():
    buf = io.StringIO()
    write_csv([dict(a=0.1, b=1), dict(a=1 / 3, b=2)], buf, ["b", "a"])
    lines = buf.getvalue().splitlines()
    assert lines[0] == "b,a"
    assert float(lines[2].split(",")[1]) == 1 / 3
