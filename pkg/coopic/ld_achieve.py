"""
Achievable rate systems of the cooperative scheme on the linear deterministic
channel, one per cooperation regime, and the resulting sum-rate.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Tuple, Union

import pandas as pd

from .ld_capacity import (
    Regime,
    choose_n_prime_C,
    classify_regime,
    cooperation_condition_holds,
    ld_sum_capacity,
    u1_at,
    u_terms,
)
from .ld_model import LdParams
from .rate_region import LP_OPTIMAL, ConstraintSystem, LpResult, max_sum_rate, rename, symmetric_closure
from .utils import pos

USER_SWAP = {"rV1": "rV2", "rU1": "rU2", "rZ1": "rZ2", "rS1": "rS2"}

REGIME1_VARS = ("rV1", "rV2", "rU1", "rU2", "rZ1", "rZ2")
NO_COOP_VARS = ("rU1", "rU2", "rZ1", "rZ2")
REGIME3_VARS = ("rV1", "rV2", "rU1", "rU2", "rZ1", "rZ2", "rS1")
REGIME4_VARS = ("rV1", "rV2", "rS1", "rS2", "rZ1", "rZ2")


def rate_groups(vars) -> Dict[str, Tuple[str, ...]]:
    return {
        "R1": tuple(v for v in vars if v.endswith("1")),
        "R2": tuple(v for v in vars if v.endswith("2")),
    }


def mirrored_system(one_side, vars, levels) -> ConstraintSystem:
    """Rows for destination 3 plus the same rows written for destination 4."""
    n13, n14, n23, n24, nC = levels
    mine = ConstraintSystem.build(vars, one_side(n13, n14, n23, n24, nC), rate_groups(vars), clip_negative=True)
    theirs = ConstraintSystem.build(vars, one_side(n24, n23, n14, n13, nC), rate_groups(vars), clip_negative=True)
    return symmetric_closure(mine, USER_SWAP, mirror=theirs)


def regime1_rows(n13, n14, n23, n24, nC):
    return [
        ({"rV1": 1}, nC, "rV1"),
        ({"rZ1": 1}, pos(n13 - n14), "rZ1"),
        ({"rU1": 1, "rZ1": 1}, n13 - nC, "rU1+rZ1"),
        ({"rU2": 1, "rZ1": 1}, max(n13 - n14, n23 - nC), "rU2+rZ1"),
        ({"rU1": 1, "rU2": 1, "rZ1": 1}, max(n13 - nC, n23 - nC), "rU1+rU2+rZ1"),
        ({"rV1": 1, "rV2": 1, "rU1": 1, "rU2": 1, "rZ1": 1}, max(n13, n23), "sum@3"),
    ]


def _no_cooperation_rows(n13, n14, n23, n24, nC):
    return [
        ({"rZ1": 1}, pos(n13 - n14), "rZ1"),
        ({"rU1": 1, "rZ1": 1}, n13, "rU1+rZ1"),
        ({"rU2": 1, "rZ1": 1}, max(n13 - n14, n23), "rU2+rZ1"),
        ({"rU1": 1, "rU2": 1, "rZ1": 1}, max(n13, n23), "sum@3"),
    ]


def regime1_system(params: LdParams) -> ConstraintSystem:
    return mirrored_system(regime1_rows, REGIME1_VARS, params.levels)


def no_cooperation_system(params: LdParams) -> ConstraintSystem:
    return mirrored_system(_no_cooperation_rows, NO_COOP_VARS, params.levels)


def regime3_system(params: LdParams, n_prime_C: int) -> ConstraintSystem:
    """
    Moderate cooperation, written for n13 <= nC <= n24. Only source 1 sends a
    cooperative-private signal, U1 is constant.
    """
    n13, n14, n23, n24, nC = params.levels
    npc = n_prime_C
    z1 = pos(n13 - n14)
    equal = n13 + n24 == n14 + n23
    if n24 >= n14:
        # S1 also arrives at Y3 shifted by n13
        s_terms = [n23 - n24] if equal else [n13, n23 - (n24 - n14)]
    else:
        s_terms = [n23 - n24] if equal else [n13 - (n14 - n24), n23 - n24]
    rows = [
        ({"rU1": 1}, 0, "rU1=0"),
        ({"rS1": 1}, pos(nC - max(n13, n14)), "rS1"),
        ({"rV1": 1, "rU1": 1, "rZ1": 1, "rS1": 1}, nC, "decode@2"),
        ({"rV2": 1}, npc, "rV2"),
        ({"rZ1": 1}, z1, "rZ1"),
        ({"rU2": 1, "rZ1": 1}, max(z1, n23 - npc), "rU2+rZ1"),
        ({"rS1": 1, "rZ1": 1}, max([z1] + s_terms), "rS1+rZ1"),
        ({"rU2": 1, "rS1": 1, "rZ1": 1}, max([z1, n23 - npc] + s_terms), "rU2+rS1+rZ1"),
        ({"rV1": 1, "rV2": 1, "rU2": 1, "rS1": 1, "rZ1": 1}, max(n13, n23), "sum@3"),
        ({"rZ2": 1}, pos(n24 - n23), "rZ2"),
        ({"rU2": 1, "rZ2": 1}, max(pos(n24 - n23), n24 - npc), "rU2+rZ2"),
        ({"rV1": 1, "rV2": 1, "rU2": 1, "rZ2": 1}, max(n24, n14), "sum@4"),
    ]
    return ConstraintSystem.build(REGIME3_VARS, rows, rate_groups(REGIME3_VARS), clip_negative=True)


def n_S1(levels) -> int:
    n13, n14, n23, n24, _ = levels
    if n13 + n24 == n14 + n23:
        return pos(n23 - n24)
    if n24 >= n14:
        return max(n13, n23 - (n24 - n14))
    return max(n23, n13 - (n14 - n24))


def _regime4_rows(n13, n14, n23, n24, nC):
    z1 = pos(n13 - n14)
    return [
        ({"rS1": 1}, pos(nC - max(n13, n14)), "rS1"),
        ({"rV1": 1, "rZ1": 1, "rS1": 1}, nC, "decode@2"),
        ({"rZ1": 1}, z1, "rZ1"),
        ({"rS1": 1, "rZ1": 1}, max(z1, n_S1((n13, n14, n23, n24, nC))), "rS1+rZ1"),
        ({"rV1": 1, "rV2": 1, "rS1": 1, "rZ1": 1}, max(n13, n23), "sum@3"),
    ]


def regime4_system(params: LdParams) -> ConstraintSystem:
    return mirrored_system(_regime4_rows, REGIME4_VARS, params.levels)


@dataclass(frozen=True)
class LdSchemeInstance:
    regime: Regime
    system: ConstraintSystem
    n_prime_C: Optional[int] = None  # regime III only
    aux_note: str = ""  # which auxiliary construction the rows come from
    cooperation: int = 0  # cooperation level the rows are written for


def _regime1_instance(params: LdParams, regime: Regime, m: int, note: str) -> LdSchemeInstance:
    return LdSchemeInstance(regime, regime1_system(params.with_nC(m)), None, note, m)


def _no_cooperation_instance(params: LdParams, regime: Regime) -> LdSchemeInstance:
    return LdSchemeInstance(regime, no_cooperation_system(params.with_nC(0)), None, "no cooperation", 0)


def _regime3_instance(params: LdParams, regime: Regime, npc: Optional[int] = None) -> LdSchemeInstance:
    work = params.swapped() if regime.swap_applied else params
    if npc is None:
        npc = choose_n_prime_C(work.levels, min(work.nC, work.n23)).value
    system = regime3_system(work, npc)
    if regime.swap_applied:
        system = rename(system, {**USER_SWAP, **{v: k for k, v in USER_SWAP.items()}})
        system = ConstraintSystem.build(system.vars, system.rows, rate_groups(system.vars))
    case = "n24>=n14" if work.n24 >= work.n14 else "n24<n14"
    return LdSchemeInstance(regime, system, npc, f"cooperative-private S1 precoding ({case})", work.nC)


def instantiate_ld_constraints(params: LdParams) -> LdSchemeInstance:
    """The scheme the regime calls for, before any fallback."""
    regime = classify_regime(params)
    if regime.tag == "I":
        if not cooperation_condition_holds(params.levels):
            return _no_cooperation_instance(params, regime)
        return _regime1_instance(params, regime, params.nC, "cooperative-public V")
    if regime.tag == "II":
        return _regime1_instance(params, regime, params.nmin, "cooperative-public V at nC=nmin")
    if regime.tag == "III":
        return _regime3_instance(params, regime)
    return LdSchemeInstance(regime, regime4_system(params), None, "cooperative-private S1/S2 precoding", params.nC)


def candidate_instances(params: LdParams) -> List[LdSchemeInstance]:
    """
    Every instance the dispatcher compares. A scheme written for a weaker
    cooperation link is always usable, so the lower-level systems are valid
    candidates in every regime.
    """
    regime = classify_regime(params)
    top = min(params.nC, params.nmin)
    m_star = choose_n_prime_C(params.levels, top).value
    levels = sorted({m_star, min(m_star + 1, top), top})
    out = [instantiate_ld_constraints(params)]
    out += [_regime1_instance(params, regime, m, f"cooperative-public V at m={m}") for m in levels]
    out.append(_no_cooperation_instance(params, regime))
    if regime.tag == "III":
        work = params.swapped() if regime.swap_applied else params
        npc = out[0].n_prime_C
        if npc + 1 <= min(work.nC, work.n23):
            out.append(_regime3_instance(params, regime, npc + 1))
    if regime.tag == "IV" and params.n13 != params.n24:
        # degrade the link to the regime III range
        weaker = params.with_nC(max(params.n13, params.n24))
        out.append(_regime3_instance(weaker, classify_regime(weaker)))
    return out


@lru_cache(maxsize=65536)
def _solve(system: ConstraintSystem) -> LpResult:
    return max_sum_rate(system)


def _as_integer(x: Fraction) -> Union[int, Fraction]:
    return int(x) if x.denominator == 1 else x


def best_instance(params: LdParams) -> Tuple[LdSchemeInstance, LpResult]:
    best = None
    for inst in candidate_instances(params):
        res = _solve(inst.system)
        if res.status != LP_OPTIMAL:
            raise RuntimeError(f"{inst.aux_note} system for {params} is {res.status}")
        if best is None or res.optimum > best[1].optimum:
            best = (inst, res)
    return best


def ld_achievable_sum_rate(params: LdParams) -> Union[int, Fraction]:
    return _as_integer(best_instance(params)[1].optimum)


def ld_rate_choice_regime1(params: LdParams) -> Dict[str, int]:
    """
    The explicit rates that reach u1 in regime I when cooperation helps and u1 is
    the binding bound.
    """
    levels = params.levels
    n13, n14, n23, n24, nC = levels
    u = u_terms(levels)
    if classify_regime(params).tag != "I":
        raise ValueError(f"{params} is not in regime I")
    if not cooperation_condition_holds(levels):
        raise ValueError(f"Cooperation does not help on {params}")
    if u1_at(levels, nC) > min(u[1:]):
        raise ValueError(f"u1 is not the binding bound on {params}")
    return {
        "rV1": nC,
        "rV2": nC,
        "rU1": pos(max(n24 - n23, n14 - nC) - pos(n24 - n23)),
        "rU2": pos(max(n13 - n14, n23 - nC) - pos(n13 - n14)),
        "rZ1": pos(n13 - n14),
        "rZ2": pos(n24 - n23),
    }


def verify_grid(bound: Union[int, range], p: int = 3, progress=None) -> pd.DataFrame:
    """
    Compare the achievable sum-rate with the capacity formula on {0..bound}^5,
    or on range^5 when a range of levels is given.
    """
    values = range(bound + 1) if isinstance(bound, int) else bound
    tuples = list(product(values, repeat=5))
    iterator = progress(tuples) if progress is not None else tuples
    rows = []
    for levels in iterator:
        params = LdParams(*levels, p=p)
        capacity = ld_sum_capacity(params)
        achievable = ld_achievable_sum_rate(params)
        rows.append(
            dict(
                n13=levels[0], n14=levels[1], n23=levels[2], n24=levels[3], nC=levels[4],
                capacity=capacity,
                achievable=achievable,
                regime=str(classify_regime(params)),
                match=achievable == capacity,
            )
        )
    return pd.DataFrame(rows)
