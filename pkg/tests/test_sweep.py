import math

import pytest

from coopic.sweep import log_spaced, ordered_map, sample_channels
from coopic.utils import db_to_magnitude


def test_sample_channels_is_seeded():
    assert sample_channels(5, seed=11) == sample_channels(5, seed=11)
    assert sample_channels(5, seed=11) != sample_channels(5, seed=12)


def test_sample_channels_ranges():
    lo, hi = db_to_magnitude(-20), db_to_magnitude(80)
    for params in sample_channels(200, seed=0):
        assert all(lo <= h <= hi for h in params.magnitudes)
        assert 0 <= params.theta < 2 * math.pi


def test_sample_channels_validation():
    assert sample_channels(0, seed=0) == []
    with pytest.raises(ValueError):
        sample_channels(-1, seed=0)
    with pytest.raises(ValueError):
        sample_channels(3, seed=0, db_min=10, db_max=0)


@pytest.mark.parametrize("jobs", [1, 2])
def test_ordered_map_keeps_input_order(jobs):
    items = [-5, 3, -1, 7, 0, -2]
    assert ordered_map(abs, items, jobs) == [5, 3, 1, 7, 0, 2]


def test_log_spaced():
    values = log_spaced(0, 40, 3)
    assert values.tolist() == pytest.approx([1.0, 10.0, 100.0])
