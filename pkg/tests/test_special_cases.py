import math
from itertools import product

import numpy as np
import pytest

from coopic.gauss_capacity import gauss_u_terms
from coopic.gauss_model import GaussParams
from coopic.special_cases import (
    FEEDBACK_MAX_GAP,
    FIG2_TOL,
    REVERSIBILITY_MAX_DIFF,
    SymmetricParams,
    dest_coop_bounds,
    feedback_bound,
    feedback_gap,
    feedback_to_coop,
    fig2_curve,
    fig2_limit,
    ld_feedback_capacity,
    primed_minima,
    reversibility_check,
    symmetric_achievable,
    symmetric_C,
    symmetric_upper_bounds,
)
from coopic.sweep import log_spaced, sample_channels

ZERO = GaussParams(0, 0, 0, 0, 0)


def test_feedback_mapping():
    assert feedback_to_coop(100, 10) == GaussParams(100, 10, 10, 100, 10, 0.0)
    assert feedback_to_coop(0, 0) == ZERO


@pytest.mark.parametrize("hD,hI,bits", [(0, 0, 1.0), (1, 1, math.log2(20))])
def test_feedback_bound_values(hD, hI, bits):
    assert feedback_bound(hD, hI) == pytest.approx(bits)


def test_feedback_bound_is_u2_of_mapped_channel():
    for hD, hI in [(100, 10), (3, 40), (1e3, 1e3), (0.5, 2)]:
        assert feedback_bound(hD, hI) == pytest.approx(gauss_u_terms(feedback_to_coop(hD, hI)).u2, abs=1e-9)


def test_feedback_gap_on_symmetric_sweep():
    for hD in log_spaced(0, 60, 4):
        for beta in (0.0, 0.5, 1.0, 1.5):
            assert feedback_gap(hD, hD ** beta) <= FEEDBACK_MAX_GAP


def test_ld_feedback_capacity():
    assert ld_feedback_capacity(2, 1) == 3
    assert ld_feedback_capacity(0, 0) == 0


def test_symmetric_C():
    assert symmetric_C(1, 0) == pytest.approx(2.0)
    assert symmetric_C(100, 1e4) == pytest.approx(math.log2(4e8))
    with pytest.raises(ValueError):
        symmetric_C(0, 1)


def test_symmetric_params():
    params = SymmetricParams.with_sqrt_cross(16, 2)
    assert params.hI == 4
    assert params.to_gauss() == GaussParams(16, 4, 4, 16, 2, 0.0)
    with pytest.raises(ValueError):
        SymmetricParams(-1, 0, 0)


def test_symmetric_bounds_agree_with_general_terms():
    for hD in (10.0, 1e3):
        for hC in (0.0, 5.0, 1e4):
            upper = symmetric_upper_bounds(hD, hC)
            assert upper.u5 == pytest.approx(upper.general.u5)
            assert upper.u2 == pytest.approx(upper.general.u2)


@pytest.mark.parametrize("hD", [1e3, 1e4, 1e5, 1e6])
def test_symmetric_upper_bound_tracks_C(hD):
    for alpha in np.arange(0, 2.01, 0.25):
        hC = hD ** alpha
        assert symmetric_upper_bounds(hD, hC).min_value <= symmetric_C(hD, hC) + 0.5


@pytest.mark.parametrize("hD", [1e3, 1e4])
def test_symmetric_achievable_near_C_up_to_hD(hD):
    for alpha in (0.0, 0.5, 1.0):
        hC = hD ** alpha
        assert symmetric_achievable(hD, hC) >= symmetric_C(hD, hC) - 6.5


def test_symmetric_achievable_not_below_general_scheme():
    from coopic.gauss_achieve import gauss_achievable_sum_rate

    for hD, hC in [(100.0, 3.0), (100.0, 1e3)]:
        general, _ = gauss_achievable_sum_rate(SymmetricParams.with_sqrt_cross(hD, hC).to_gauss())
        assert symmetric_achievable(hD, hC) >= general


def test_symmetric_allocation_rescales_power():
    with pytest.warns(UserWarning):
        symmetric_achievable(0.5, 0.5)


@pytest.mark.parametrize("alpha,limit", [(0.0, 1.0), (0.25, 1.5), (0.5, 1.5), (1.0, 1.5), (1.25, 1.75), (1.5, 2.0), (2.0, 2.0)])
def test_fig2_limit(alpha, limit):
    assert fig2_limit(alpha) == pytest.approx(limit)


def test_fig2_curve_near_limit():
    for alpha in (0.5, 0.75, 1.0, 1.25, 1.5):
        assert abs(fig2_curve(alpha, 1e6) - fig2_limit(alpha)) <= FIG2_TOL


def test_fig2_curve_non_decreasing():
    curve = [fig2_curve(alpha, 1e6) for alpha in np.arange(0, 2.001, 0.05)]
    assert all(b >= a - 1e-12 for a, b in zip(curve, curve[1:]))


def test_fig2_curve_needs_gain():
    with pytest.raises(ValueError):
        fig2_curve(0.5, 1.0)


def test_dest_coop_bounds_zero_channel():
    bounds = dest_coop_bounds(ZERO)
    assert bounds.v4 == 0.0
    assert bounds.v5 == 0.0
    assert bounds.min_value == 0.0


def test_dest_coop_v1_case_split():
    bounds = dest_coop_bounds(GaussParams(4, 2, 8, 4, 2))
    # |h23| = 8 exceeds max(1, hC); |h14| = 2 does not
    assert bounds.v1 == pytest.approx(math.log2(26.25) + math.log2(197))
    assert bounds.v2 == pytest.approx(math.log2(1 + 64) + math.log2(1 + 16 / 4))


def test_dest_coop_shared_forms():
    for params in sample_channels(200, seed=4):
        u = gauss_u_terms(params)
        v = dest_coop_bounds(params)
        assert v.v5 == pytest.approx(u.u5, abs=1e-12)
        assert u.u4 - 1e-12 <= v.v4 <= u.u4 + 2 + 1e-12


def test_primed_minima_example():
    assert primed_minima((5, 1, 3, 2, 2)) == (5, 5)


def test_primed_minima_grid():
    for levels in product(range(5), repeat=5):
        source, dest = primed_minima(levels)
        assert source == dest, levels


def test_reversibility_zero_channel():
    equal, diff = reversibility_check(ZERO)
    assert equal
    assert diff == 0.0


def test_reversibility_on_random_channels():
    for params in sample_channels(500, seed=9):
        _, diff = reversibility_check(params)
        assert diff <= REVERSIBILITY_MAX_DIFF
