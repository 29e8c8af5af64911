"""
Sum-capacity of the linear deterministic interference channel with source
cooperation, the four cooperation regimes and the effective cooperation level
used by the moderate-cooperation scheme.
"""
from dataclasses import dataclass
from typing import NamedTuple, Tuple

from .ld_model import LdParams
from .utils import pos

REGIME_TAGS = ("I", "II", "III", "IV")


@dataclass(frozen=True)
class LdBounds:
    u1: int
    u2: int
    u3: int
    u4: int
    u5: int

    @property
    def values(self) -> Tuple[int, int, int, int, int]:
        return (self.u1, self.u2, self.u3, self.u4, self.u5)

    @property
    def min_value(self):
        return min(self.values)

    @property
    def argmin(self) -> Tuple[int, ...]:
        m = self.min_value
        return tuple(k + 1 for k, v in enumerate(self.values) if v == m)


@dataclass(frozen=True)
class Regime:
    tag: str  # one of REGIME_TAGS
    swap_applied: bool = False  # relabeled 1<->2, 3<->4 to get n13 <= nC <= n24 (regime III)

    def __str__(self):
        return self.tag + ("*" if self.swap_applied else "")


def u_terms(levels) -> Tuple:
    """
    The five upper-bound terms on any (n13, n14, n23, n24, nC) tuple; works for
    integers, Fractions and reals alike so the Gaussian primed terms share it.
    """
    n13, n14, n23, n24, nC = levels
    u1 = max(n13 - n14 + nC, n23, nC) + max(n24 - n23 + nC, n14, nC)
    u2 = max(n13, n23) + max(n24, n23, nC) - n23
    u3 = max(n24, n14) + max(n13, n14, nC) - n14
    u4 = max(n13, nC) + max(n24, nC)
    if n13 - n23 != n14 - n24:
        u5 = max(n13 + n24, n14 + n23)
    else:
        u5 = max(n13, n14, n23, n24)
    return u1, u2, u3, u4, u5


def u1_at(levels, nC):
    n13, n14, n23, n24, _ = levels
    return u_terms((n13, n14, n23, n24, nC))[0]


def ld_u_terms(params: LdParams) -> LdBounds:
    return LdBounds(*u_terms(params.levels))


def ld_sum_capacity(params: LdParams) -> int:
    return ld_u_terms(params).min_value


def ld_upperbound_appendix_forms(params: LdParams) -> Tuple[int, int, int]:
    """The first three bounds in the form they take before simplification."""
    n13, n14, n23, n24, nC = params.levels
    a1 = max(n13 - n14, n23 - nC, 0) + nC + max(n24 - n23, n14 - nC, 0) + nC
    a2 = max(n24, n23, nC) + pos(n13 - n23)
    a3 = max(n13, n14, nC) + pos(n24 - n14)
    return a1, a2, a3


def classify_levels(levels) -> Regime:
    n13, n14, n23, n24, nC = levels
    if nC <= min(n13, n14, n23, n24):
        return Regime("I")
    if nC <= min(n13, n24):
        return Regime("II")
    if nC <= max(n13, n24):
        return Regime("III", swap_applied=n24 < n13)
    return Regime("IV")


def classify_regime(params: LdParams) -> Regime:
    return classify_levels(params.levels)


def cooperation_condition_holds(levels) -> bool:
    """True when cooperation helps at all: u1 without cooperation is the strict minimum."""
    n13, n14, n23, n24, _ = levels
    u = u_terms((n13, n14, n23, n24, 0))
    return u[0] < min(u[1:])


class NPrimeChoice(NamedTuple):
    value: int
    exact: bool  # u1(value) hit the target exactly


def choose_n_prime_C(levels, cap) -> NPrimeChoice:
    """
    Largest integer m in [0, cap] with u1(m) <= min(u2, u3, u4, u5), the other
    bounds taken at the actual cooperation level. Returns 0 when u1 without
    cooperation is already at or above that minimum.
    """
    u = u_terms(levels)
    target = min(u[1:])
    if not u1_at(levels, 0) < target:
        return NPrimeChoice(0, False)
    best = 0
    for m in range(0, int(cap) + 1):
        if u1_at(levels, m) <= target:
            best = m
        else:
            break  # u1 is non-decreasing in nC
    return NPrimeChoice(best, u1_at(levels, best) == target)


def select_n_prime_C(params: LdParams) -> int:
    return select_n_prime_C_detail(params).value


def select_n_prime_C_detail(params: LdParams) -> NPrimeChoice:
    regime = classify_regime(params)
    if regime.tag != "III":
        raise ValueError(f"n'_C is only defined in regime III, {params} is in regime {regime.tag}")
    if regime.swap_applied:
        params = params.swapped()
    return choose_n_prime_C(params.levels, min(params.nC, params.n23))
