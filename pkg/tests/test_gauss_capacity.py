import math

import pytest

from coopic.gauss_achieve import (
    candidates,
    closed_form_regime1_system,
    effective_K,
    exchange_subscripts,
    gauss_achievable_sum_rate,
    gauss_rate_choice_regime1,
    mi_system,
    raw_regime1_system,
    raw_regime3_system,
    raw_regime4_system,
    regime1_model,
    regime3_model,
    regime4_model,
)
from coopic.gauss_capacity import COOPERATIVE_MAX_GAP, MAX_GAP, gap_report, gauss_u_terms, gauss_upper_bound
from coopic.gauss_model import GaussParams, n_levels
from coopic.ld_capacity import classify_levels, cooperation_condition_holds
from coopic.rate_region import check_feasible, max_sum_rate
from coopic.sweep import sample_channels

ZERO = GaussParams(0, 0, 0, 0, 0)


def test_zero_channel():
    bounds = gauss_u_terms(ZERO)
    assert bounds.values == (0.0, 1.0, 1.0, 0.0, 0.0)
    assert gauss_upper_bound(ZERO) == 0.0
    report = gap_report(ZERO)
    assert report.achievable == pytest.approx(0.0, abs=1e-9)
    assert report.gap == pytest.approx(0.0, abs=1e-9)
    assert report.regime.tag == "I"


def test_u_terms_by_hand():
    params = GaussParams(4, 2, 2, 4, 1)
    bounds = gauss_u_terms(params)
    assert bounds.u4 == pytest.approx(2 * math.log2(18))
    assert bounds.u2 == pytest.approx(math.log2(2 * 37 * 5))
    assert bounds.u1 == pytest.approx(2 * math.log2((1 + (2 + 2) ** 2) * 2))
    cross = (4 * 4) ** 2 + (2 * 2) ** 2 - 2 * 4 * 4 * 2 * 2
    assert bounds.u5 == pytest.approx(math.log2(1 + 2 * 40 + 4 * cross))
    assert bounds.u5pp == pytest.approx(8.0)


def test_u5_depends_on_phase():
    aligned = gauss_u_terms(GaussParams(4, 2, 2, 4, 1, 0.0)).u5
    opposed = gauss_u_terms(GaussParams(4, 2, 2, 4, 1, math.pi)).u5
    assert opposed > aligned


def test_primed_terms_sandwich():
    for params in sample_channels(300, seed=2):
        bounds = gauss_u_terms(params)
        for u, up in zip(bounds.values[:4], bounds.primed[:4]):
            assert up <= u + 1e-9
            assert u - 7 <= up + 1e-9
        assert abs(bounds.u5 - bounds.u5p) <= 2 + 1e-9


def test_constant_gap_on_random_channels():
    for params in sample_channels(300, seed=1):
        report = gap_report(params)
        assert report.achievable >= -1e-9
        assert report.gap <= MAX_GAP, params
        if report.cooperative_gap is not None:
            assert report.cooperative_gap <= COOPERATIVE_MAX_GAP, params


@pytest.mark.parametrize("tag", ["I", "II", "III", "IV"])
def test_constant_gap_in_every_regime(tag):
    for params in channels_in_regime(tag, 25):
        report = gap_report(params)
        assert report.regime.tag == tag
        assert report.gap <= MAX_GAP, params


def channels_in_regime(tag: str, count: int):
    found = []
    seed = 0
    while len(found) < count:
        found += [c for c in sample_channels(50, seed=seed, db_min=0, db_max=60) if classify_levels(n_levels(c).levels).tag == tag]
        seed += 1
    return found[:count]


def test_regime1_level_conditions_below_mutual_information():
    for params in channels_in_regime("I", 20):
        closed = max_sum_rate(closed_form_regime1_system(n_levels(params).levels)).value
        mi = max_sum_rate(mi_system(regime1_model(params, params.hC))).value
        assert closed <= mi + 1e-9, params


def test_regime1_variance_scale_conditions_below_mutual_information():
    for params in channels_in_regime("I", 20):
        raw = max_sum_rate(raw_regime1_system(params)).value
        mi = max_sum_rate(mi_system(regime1_model(params, params.hC))).value
        assert raw <= mi + 1e-6, params


def test_regime3_variance_scale_conditions_below_mutual_information():
    checked = 0
    for params in sample_channels(60, seed=5, db_min=0, db_max=60):
        if params.h24 < params.h14:
            continue
        raw = max_sum_rate(raw_regime3_system(params, params.hC)).value
        mi = max_sum_rate(mi_system(regime3_model(params, params.hC))).value
        assert raw <= mi + 1e-6, params
        checked += 1
    assert checked > 0


def test_regime3_variance_scale_conditions_need_strong_h24():
    with pytest.raises(ValueError):
        raw_regime3_system(GaussParams(10, 20, 5, 10, 15), 5.0)


def test_regime4_variance_scale_conditions_below_mutual_information():
    for params in sample_channels(30, seed=6, db_min=0, db_max=60):
        raw = max_sum_rate(raw_regime4_system(params)).value
        mi = max_sum_rate(mi_system(regime4_model(params))).value
        assert raw <= mi + 1e-6, params


def test_effective_K_follows_power_rescale():
    # three unit-gain signals at 1/K each send 3/K > 1
    latents = {"V1": 1 / 2.99, "U1": 1 / 2.99, "Z1": 1 / 2.99}
    assert effective_K(2.99, latents, {"V1": 1, "U1": 1, "Z1": 1}, {}) == pytest.approx(3.0)
    assert effective_K(2.99, latents, {"V1": 1, "Z1": 1}, {"U1": 1}) == 2.99


@pytest.mark.parametrize("tag, branch", [("I", "regime-I variance-scale conditions"), ("IV", "regime-IV variance-scale conditions")])
def test_dispatcher_compares_variance_scale_conditions(tag, branch):
    params = next(
        c
        for c in channels_in_regime(tag, 200)
        if tag != "I" or cooperation_condition_holds(n_levels(c, integer=True).levels)
    )
    found, _, _ = candidates(params)
    raw = [c for c in found if c.branch == branch]
    assert len(raw) == 1 and raw[0].path == "closed-form"
    rate, detail = gauss_achievable_sum_rate(params)
    assert rate >= max_sum_rate(raw[0].system).value - 1e-9
    assert detail.closed_form_rate >= max_sum_rate(raw[0].system).value - 1e-9


def test_dispatcher_reports_branch():
    rate, detail = gauss_achievable_sum_rate(GaussParams.from_db(40, 20, 20, 40, 10))
    assert detail.rate == rate
    assert detail.branch
    assert detail.regime.tag == "I"
    assert rate >= detail.closed_form_rate - 1e-9
    assert detail.to_dict()["system"]["vars"]


def test_rate_choice_regime1():
    params = GaussParams(2.0 ** 20, 2.0 ** 10, 2.0 ** 10, 2.0 ** 20, 2.0 ** 5)
    rates = gauss_rate_choice_regime1(params)
    assert rates["rV1"] == pytest.approx(10 - math.log2(5))
    assert rates["rZ1"] == pytest.approx(18.0)
    assert rates["rU1"] == 0.0
    assert check_feasible(closed_form_regime1_system(n_levels(params).levels), rates, tol=1e-9)


def test_rate_choice_outside_regime_one():
    with pytest.raises(ValueError):
        gauss_rate_choice_regime1(GaussParams(10, 5, 5, 10, 1000))


def test_exchange_subscripts():
    assert exchange_subscripts("rU1+rZ1") == "rU2+rZ2"
    assert exchange_subscripts("W V1 V2 X1") == "W V2 V1 X2"
    assert exchange_subscripts("Y3") == "Y4"


def test_mi_system_invariant_under_relabeling():
    params = GaussParams(30, 5, 8, 12, 3, 1.0)
    res = max_sum_rate(mi_system(regime1_model(params, params.hC)))
    swapped = max_sum_rate(mi_system(regime1_model(params.swapped(), params.hC)))
    assert res.value == pytest.approx(swapped.value, abs=1e-7)


def test_gap_report_dict():
    document = gap_report(GaussParams(10, 3, 3, 10, 2)).to_dict()
    assert set(document) == {"upper", "achievable", "gap", "regime", "branch", "cooperative_gap"}
