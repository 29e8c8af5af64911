"""
Upper bounds on the Gaussian sum-capacity with source cooperation, their
level approximations, and the gap against the achievable scheme.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .gauss_achieve import gauss_achievable_sum_rate
from .gauss_model import GaussParams, n_levels
from .ld_capacity import Regime, classify_levels, u_terms

MAX_GAP = 20.0  # bits, the constant-gap guarantee
COOPERATIVE_MAX_GAP = 13.0  # bits, regime I with cooperation helping


@dataclass(frozen=True)
class GaussBounds:
    u1: float
    u2: float
    u3: float
    u4: float
    u5: float
    u1p: float
    u2p: float
    u3p: float
    u4p: float
    u5p: float
    u5pp: float  # max(n13 + n24, n14 + n23)

    @property
    def values(self) -> Tuple[float, float, float, float, float]:
        return (self.u1, self.u2, self.u3, self.u4, self.u5)

    @property
    def primed(self) -> Tuple[float, float, float, float, float]:
        return (self.u1p, self.u2p, self.u3p, self.u4p, self.u5p)

    @property
    def min_value(self) -> float:
        return min(self.values)


def _u5_argument(params: GaussParams, weight: float) -> float:
    h13, h14, h23, h24, _ = params.magnitudes
    power = h13 ** 2 + h24 ** 2 + h14 ** 2 + h23 ** 2
    cross = (h13 * h24) ** 2 + (h14 * h23) ** 2 - 2.0 * h13 * h24 * h14 * h23 * math.cos(params.theta)
    # the cross term is a squared modulus; clip rounding below zero
    return 1.0 + weight * power + weight ** 2 * max(cross, 0.0)


def gauss_u_terms(params: GaussParams) -> GaussBounds:
    h13, h14, h23, h24, hC = params.magnitudes
    coop = 1.0 + hC ** 2
    u1 = (
        math.log2((1.0 + (h13 / max(1.0, h14) + h23 / max(1.0, hC)) ** 2) * coop)
        + math.log2((1.0 + (h24 / max(1.0, h23) + h14 / max(1.0, hC)) ** 2) * coop)
    )
    u2 = math.log2(2.0 * (1.0 + (h13 + h23) ** 2) * (1.0 + max(h24 ** 2, h23 ** 2, hC ** 2) / max(1.0, h23 ** 2)))
    u3 = math.log2(2.0 * (1.0 + (h24 + h14) ** 2) * (1.0 + max(h13 ** 2, h14 ** 2, hC ** 2) / max(1.0, h14 ** 2)))
    u4 = math.log2(1.0 + h13 ** 2 + hC ** 2) + math.log2(1.0 + h24 ** 2 + hC ** 2)
    u5 = math.log2(_u5_argument(params, 2.0))

    levels = n_levels(params).levels
    u1p, u2p, u3p, u4p, _ = u_terms(levels)
    n13, n14, n23, n24, _ = levels
    return GaussBounds(
        u1, u2, u3, u4, u5,
        u1p, u2p, u3p, u4p,
        u5p=math.log2(_u5_argument(params, 1.0)),
        u5pp=max(n13 + n24, n14 + n23),
    )


def gauss_upper_bound(params: GaussParams) -> float:
    return gauss_u_terms(params).min_value


@dataclass(frozen=True)
class GapReport:
    upper: float
    achievable: float
    gap: float
    regime: Regime  # on the real-valued levels
    branch: str = ""  # which candidate scheme reached the achievable rate
    cooperative_gap: Optional[float] = None  # upper minus the regime-I cooperative branch, when cooperation helps

    def to_dict(self) -> dict:
        return {
            "upper": self.upper,
            "achievable": self.achievable,
            "gap": self.gap,
            "regime": str(self.regime),
            "branch": self.branch,
            "cooperative_gap": self.cooperative_gap,
        }


def gap_report(params: GaussParams) -> GapReport:
    upper = gauss_upper_bound(params)
    rate, detail = gauss_achievable_sum_rate(params)
    cooperative_gap = None
    if detail.cooperative_rate is not None:
        cooperative_gap = upper - detail.cooperative_rate
    return GapReport(
        upper=upper,
        achievable=rate,
        gap=upper - rate,
        regime=classify_levels(n_levels(params).levels),
        branch=detail.branch,
        cooperative_gap=cooperative_gap,
    )
