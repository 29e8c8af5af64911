"""
Specializations: output feedback, the symmetric channel with hI = sqrt(hD) and
its normalized capacity curve, and the destination-cooperation bounds used to
compare the two cooperation settings.
"""
import math
from dataclasses import dataclass
from typing import Tuple

from .gauss_achieve import assemble_model, gauss_achievable_sum_rate, mi_system
from .gauss_capacity import GaussBounds, gauss_u_terms
from .gauss_model import GaussParams, n_levels
from .ld_capacity import ld_sum_capacity, u_terms
from .ld_model import LdParams
from .rate_region import LP_OPTIMAL, max_sum_rate

FEEDBACK_MAX_GAP = 19.0
REVERSIBILITY_MAX_DIFF = 7.0
# at hD = 1e6 the normalized curve is within FIG2_TOL of its limit for alpha in the window
FIG2_TOL = 0.05
FIG2_ALPHA_WINDOW = (0.5, 1.5)


def feedback_to_coop(hD: float, hI: float) -> GaussParams:
    """
    The symmetric feedback channel seen as a source-cooperation channel: each
    source hears the other through its own cross link.
    """
    return GaussParams(hD, hI, hI, hD, hI, 0.0)


def feedback_bound(hD: float, hI: float) -> float:
    if hD < 0 or hI < 0:
        raise ValueError(f"Magnitudes must be non-negative, got hD={hD!r}, hI={hI!r}")
    return math.log2(2.0 * (1.0 + (hD + hI) ** 2) * (1.0 + max(hD ** 2, hI ** 2) / max(1.0, hI ** 2)))


def feedback_gap(hD: float, hI: float) -> float:
    rate, _ = gauss_achievable_sum_rate(feedback_to_coop(hD, hI))
    return feedback_bound(hD, hI) - rate


def ld_feedback_capacity(nD: int, nI: int) -> int:
    """The deterministic feedback channel is the cooperation channel with nC = nI."""
    return ld_sum_capacity(LdParams(nD, nI, nI, nD, nI))


@dataclass(frozen=True)
class SymmetricParams:
    hD: float
    hI: float
    hC: float

    def __post_init__(self):
        for name in ("hD", "hI", "hC"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be a finite non-negative magnitude, got {v!r}")

    @classmethod
    def with_sqrt_cross(cls, hD: float, hC: float) -> "SymmetricParams":
        return cls(hD, math.sqrt(hD), hC)

    def to_gauss(self) -> GaussParams:
        return GaussParams(self.hD, self.hI, self.hI, self.hD, self.hC, 0.0)


def _check_hD(hD: float):
    if not hD > 0:
        raise ValueError(f"hD must be positive, got {hD!r}")


def symmetric_C(hD: float, hC: float) -> float:
    _check_hD(hD)
    return min(
        2.0 * math.log2(2.0 * hD * (1.0 + hC ** 2)),
        math.log2(2.0 * hD ** 2 * (1.0 + max(hD ** 2, hC ** 2) / hD)),
        math.log2(4.0 * hD ** 4),
    )


@dataclass(frozen=True)
class SymmetricBounds:
    u1_tight: float  # 2 log((1 + 2hD)(1 + hC^2))
    u2: float  # equals u3 on this channel
    u5: float
    general: GaussBounds

    @property
    def min_value(self) -> float:
        return min(self.u1_tight, self.u2, self.u5, self.general.min_value)


def symmetric_upper_bounds(hD: float, hC: float) -> SymmetricBounds:
    _check_hD(hD)
    return SymmetricBounds(
        u1_tight=2.0 * math.log2((1.0 + 2.0 * hD) * (1.0 + hC ** 2)),
        u2=math.log2(2.0 * (1.0 + (hD + math.sqrt(hD)) ** 2) * (1.0 + max(hD ** 2, hC ** 2) / hD)),
        u5=math.log2(1.0 + 4.0 * (hD ** 2 + hD) + 4.0 * (hD ** 2 - hD) ** 2),
        general=gauss_u_terms(SymmetricParams.with_sqrt_cross(hD, hC).to_gauss()),
    )


def _public_allocation(params: GaussParams):
    hD, hC = params.h13, params.hC
    z = 1.0 / max(1.0, hD)
    u = 1.0 / max(1.0, hC ** 2)
    v = max(1.0 - z - u, 0.0)
    latents = {"V1": v, "V2": v, "U1": u, "U2": u, "Z1": z, "Z2": z}
    aux = {name: (name,) for name in latents}
    x1 = {"V1": 1, "U1": 1, "Z1": 1}
    x2 = {"V2": 1, "U2": 1, "Z2": 1}
    return assemble_model(params, latents, x1, x2, aux, "a", "symmetric cooperative-public allocation")


def _precoded_allocation(params: GaussParams):
    hD, hX = params.h13, params.h14
    sp = 1.0 / max(1.0, hD ** 2)
    z = 0.5 / max(1.0, hD)
    rest = max(1.0 - sp - z, 0.0)
    s = rest / (2.0 * (1.0 + (hX / hD) ** 2))
    v = rest / 2.0
    latents = {"V1": v, "V2": v, "S1": s, "S2": s, "Z1": z, "Z2": z, "Sp1": sp, "Sp2": sp}
    x1 = {"V1": 1, "S1": 1, "S2": -hX / hD, "Z1": 1, "Sp1": 1}
    x2 = {"V2": 1, "S2": 1, "S1": -hX / hD, "Z2": 1, "Sp2": 1}
    aux = {"V1": ("V1",), "V2": ("V2",), "Z1": ("Z1",), "Z2": ("Z2",), "S1": ("S1",), "S2": ("S2",)}
    return assemble_model(params, latents, x1, x2, aux, "b", "symmetric precoding allocation")


def symmetric_achievable(hD: float, hC: float) -> float:
    """
    Sum-rate of the symmetric channel's own allocations: cooperative-public
    signalling while hC <= hD, zero-forced cooperative-private signals beyond.
    Never below the general scheme on the same channel.
    """
    _check_hD(hD)
    params = SymmetricParams.with_sqrt_cross(hD, hC).to_gauss()
    scheme = _public_allocation(params) if hC <= hD else _precoded_allocation(params)
    res = max_sum_rate(mi_system(scheme))
    if res.status != LP_OPTIMAL:
        raise RuntimeError(f"{scheme.note} system for hD={hD}, hC={hC} is {res.status}")
    general, _ = gauss_achievable_sum_rate(params)
    return max(float(res.optimum), general)


def fig2_curve(alpha: float, hD: float) -> float:
    """symmetric_C at hC = hD^alpha, normalized by the direct-link capacity log |hD|^2."""
    if not hD > 1:
        raise ValueError(f"hD must exceed 1 for the normalized curve, got {hD!r}")
    return symmetric_C(hD, hD ** alpha) / math.log2(hD ** 2)


def fig2_limit(alpha: float) -> float:
    return min(1.0 + 2.0 * alpha, 0.5 + max(1.0, alpha), 2.0)


@dataclass(frozen=True)
class DestCoopBounds:
    v1: float
    v2: float
    v3: float
    v4: float
    v5: float
    v1p: float
    v2p: float
    v3p: float

    @property
    def values(self) -> Tuple[float, float, float, float, float]:
        return (self.v1, self.v2, self.v3, self.v4, self.v5)

    @property
    def min_value(self) -> float:
        return min(self.values)


def _v1_half(direct: float, cross_near: float, cross_far: float, hC: float) -> float:
    """One of the two halves of v1: direct/cross_far is the leakage the helper cancels."""
    if cross_far > max(1.0, hC):
        return math.log2(1.0 + (cross_near + hC + direct * hC / cross_far) ** 2 + (direct / cross_far) ** 2)
    return math.log2(1.0 + (cross_near + hC + direct) ** 2)


def dest_primed_terms(levels) -> Tuple:
    n13, n14, n23, n24, nC = levels
    v1p = max(n13 - n23 + nC, n14, nC) + max(n24 - n14 + nC, n23, nC)
    v2p = max(n24, n14) + max(n13, n14, nC) - n14
    v3p = max(n13, n23) + max(n24, n23, nC) - n23
    return v1p, v2p, v3p


def dest_coop_bounds(params: GaussParams) -> DestCoopBounds:
    h13, h14, h23, h24, hC = params.magnitudes
    v1 = _v1_half(h13, h14, h23, hC) + _v1_half(h24, h23, h14, hC)
    v2 = math.log2(1.0 + (h13 + h14 + hC) ** 2) + math.log2(1.0 + h24 ** 2 / max(1.0, h14 ** 2))
    v3 = math.log2(1.0 + (h24 + h23 + hC) ** 2) + math.log2(1.0 + h13 ** 2 / max(1.0, h23 ** 2))
    v4 = math.log2(1.0 + (h13 + hC) ** 2) + math.log2(1.0 + (h24 + hC) ** 2)
    v5 = gauss_u_terms(params).u5
    return DestCoopBounds(v1, v2, v3, v4, v5, *dest_primed_terms(n_levels(params).levels))


def primed_minima(levels) -> Tuple:
    """min(u'1, u'2, u'3) and min(v'1, v'2, v'3) on one level tuple."""
    return min(u_terms(levels)[:3]), min(dest_primed_terms(levels))


def reversibility_check(params: GaussParams) -> Tuple[bool, float]:
    source, dest = primed_minima(n_levels(params, integer=True).levels)
    diff = abs(gauss_u_terms(params).min_value - dest_coop_bounds(params).min_value)
    return source == dest, diff
