from itertools import product

import pytest

from coopic.ld_achieve import (
    best_instance,
    instantiate_ld_constraints,
    ld_achievable_sum_rate,
    ld_rate_choice_regime1,
    regime1_system,
    verify_grid,
)
from coopic.ld_capacity import classify_regime, ld_sum_capacity
from coopic.ld_model import LdParams
from coopic.rate_region import check_feasible, max_sum_rate, max_sum_rate_by_elimination


@pytest.mark.parametrize("levels", [(4, 2, 2, 4, 1), (6, 3, 3, 4, 1), (4, 3, 3, 4, 5), (4, 3, 3, 4, 0), (3, 2, 2, 6, 4)])
def test_achievable_equals_capacity_on_worked_channels(levels):
    params = LdParams(*levels)
    assert ld_achievable_sum_rate(params) == ld_sum_capacity(params)


def test_example2_regime1_system_reaches_capacity():
    assert max_sum_rate(regime1_system(LdParams(6, 3, 3, 4, 1))).value == 7


def test_small_grid_matches_capacity():
    for levels in product(range(3), repeat=5):
        params = LdParams(*levels)
        assert ld_achievable_sum_rate(params) == ld_sum_capacity(params), levels


def test_full_grid_matches_capacity():
    for levels in product(range(6), repeat=5):
        params = LdParams(*levels)
        assert ld_achievable_sum_rate(params) == ld_sum_capacity(params), levels


@pytest.mark.parametrize("levels, capacity", [((1, 1, 0, 2, 2), 3), ((1, 1, 0, 3, 2), 4)])
def test_regime3_cooperative_private_seen_at_direct_level(levels, capacity):
    # S1 arrives at Y3 through n13 even when n24 > n14
    params = LdParams(*levels)
    assert str(classify_regime(params)) == "III"
    assert ld_sum_capacity(params) == capacity
    assert ld_achievable_sum_rate(params) == capacity


def test_verify_grid_table():
    df = verify_grid(1)
    assert len(df) == 32
    assert df["match"].all()
    assert list(df.columns) == ["n13", "n14", "n23", "n24", "nC", "capacity", "achievable", "regime", "match"]


def test_verify_grid_accepts_range():
    df = verify_grid(range(1, 3))
    assert len(df) == 32
    assert df["n13"].min() == 1


def test_lp_matches_elimination_on_instances():
    for levels in [(4, 2, 2, 4, 1), (6, 3, 3, 4, 1), (4, 3, 3, 4, 5), (3, 2, 2, 6, 4)]:
        inst, res = best_instance(LdParams(*levels))
        assert max_sum_rate_by_elimination(inst.system) == res.optimum


def test_rate_choice_regime1():
    params = LdParams(4, 2, 2, 4, 1)
    rates = ld_rate_choice_regime1(params)
    assert rates == {"rV1": 1, "rV2": 1, "rU1": 0, "rU2": 0, "rZ1": 2, "rZ2": 2}
    assert check_feasible(regime1_system(params), rates)
    assert sum(rates.values()) == ld_sum_capacity(params)


def test_rate_choice_regime1_second_channel():
    params = LdParams(5, 3, 3, 5, 1)
    rates = ld_rate_choice_regime1(params)
    assert check_feasible(regime1_system(params), rates)
    assert sum(rates.values()) == ld_sum_capacity(params) == 6


def test_rate_choice_outside_regime_one():
    with pytest.raises(ValueError):
        ld_rate_choice_regime1(LdParams(4, 3, 3, 4, 5))


def test_instantiate_picks_regime_scheme():
    assert instantiate_ld_constraints(LdParams(4, 2, 2, 4, 1)).regime.tag == "I"
    inst = instantiate_ld_constraints(LdParams(3, 2, 2, 6, 4))
    assert inst.regime.tag == "III"
    assert inst.n_prime_C == 1
    assert "rS1" in inst.system.vars
