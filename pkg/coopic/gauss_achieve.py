"""
Achievable sum-rates of the cooperative scheme on the Gaussian channel.

Each regime gets a linear Gaussian model (the auxiliary variances and the
precoding of the cooperative-private signals) whose decoding conditions are
evaluated with the mutual information engine, and the simplified level
conditions with their constant slacks. The sum-rate is the best linear program
optimum over all instantiations.
"""
import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .gauss_model import GaussParams, LinearGaussianModel, gaussian_cmi, n_levels
from .ld_achieve import (
    REGIME1_VARS,
    REGIME3_VARS,
    REGIME4_VARS,
    USER_SWAP,
    mirrored_system,
    rate_groups,
    regime1_rows,
)
from .ld_capacity import Regime, choose_n_prime_C, classify_levels, cooperation_condition_holds
from .rate_region import LP_OPTIMAL, ConstraintSystem, check_feasible, max_sum_rate, rename, symmetric_closure
from .utils import pos

# variance scale-downs; each keeps the transmit power below one for its regime
K_REGIME_I = 2.99
K_REGIME_III_CASE1 = 4.99
K_REGIME_III_CASE2 = 3.99
K_REGIME_IV = 6.99
K_NO_COOPERATION = 1.99
POWER_TOL = 1e-9

LOG4 = 2.0
LOG5 = math.log2(5)
LOG6 = math.log2(6)
LOG7 = math.log2(7)
LOG8 = 3.0
LOG11 = math.log2(11)

# (rate sum, decoded auxiliaries, observation, conditioning), written for
# source 1 / destination 3; the other side follows by exchanging subscripts
SCHEME_A = (
    ("rV1", "V1", "Y2", "W"),
    ("rZ1", "X1", "Y3", "V1 V2 W U1 U2"),
    ("rU1+rZ1", "U1 X1", "Y3", "V1 V2 W U2"),
    ("rU2+rZ1", "U2 X1", "Y3", "V1 V2 W U1"),
    ("rU1+rU2+rZ1", "U1 U2 X1", "Y3", "V1 V2 W"),
    ("rV1+rV2+rU1+rU2+rZ1", "W V1 V2 U1 U2 X1", "Y3", ""),
)

_DEST3_WITH_S1 = (
    ("rZ1", "Z1", "Y3", "V1 V2 W U1 U2 S1"),
    ("rU1+rZ1", "U1 Z1", "Y3", "V1 V2 W U2 S1"),
    ("rS1+rZ1", "S1 Z1", "Y3", "V1 V2 W U1 U2"),
    ("rS1+rU1+rZ1", "S1 U1 Z1", "Y3", "V1 V2 W U2"),
    ("rU2+rZ1", "U2 Z1", "Y3", "V1 V2 W U1 S1"),
    ("rU2+rU1+rZ1", "U2 U1 Z1", "Y3", "V1 V2 W S1"),
    ("rU2+rS1+rZ1", "U2 S1 Z1", "Y3", "V1 V2 W U1"),
    ("rU2+rS1+rU1+rZ1", "U2 S1 U1 Z1", "Y3", "V1 V2 W"),
    ("rV1+rV2+rU1+rU2+rS1+rZ1", "W V1 V2 U1 U2 S1 Z1", "Y3", ""),
)

SCHEME_B = (
    ("rS1", "X1", "Y2", "W S1 S2 Z1 U1 V1"),
    ("rZ1+rS1", "Z1 X1", "Y2", "W S1 S2 U1 V1"),
    ("rU1+rZ1+rS1", "U1 Z1 X1", "Y2", "W S1 S2 V1"),
    ("rV1+rU1+rZ1+rS1", "V1 U1 Z1 X1", "Y2", "W S1 S2"),
) + _DEST3_WITH_S1

# scheme (c) is one-sided: only source 1 has a cooperative-private signal
SCHEME_C = (
    ("rS1", "X1", "Y2", "W S1 Z1 U1 V1"),
    ("rZ1+rS1", "Z1 X1", "Y2", "W S1 U1 V1"),
    ("rU1+rZ1+rS1", "U1 Z1 X1", "Y2", "W S1 V1"),
    ("rV1+rU1+rZ1+rS1", "V1 U1 Z1 X1", "Y2", "W S1"),
    ("rV2", "V2", "Y1", "W S1"),
) + _DEST3_WITH_S1 + (
    ("rZ2", "Z2", "Y4", "V1 V2 W U1 U2"),
    ("rU2+rZ2", "U2 Z2", "Y4", "V1 V2 W U1"),
    ("rU1+rZ2", "U1 Z2", "Y4", "V1 V2 W U2"),
    ("rU1+rU2+rZ2", "U1 U2 Z2", "Y4", "V1 V2 W"),
    ("rV1+rV2+rU1+rU2+rZ2", "W V1 V2 U1 U2 Z2", "Y4", ""),
)

_EXCHANGE = str.maketrans("1234", "2143")

TEMPLATES = {"a": (SCHEME_A, True), "b": (SCHEME_B, True), "c": (SCHEME_C, False)}  # (rows, mirrored)
SCHEME_VARS = {
    "a": REGIME1_VARS,
    "b": ("rV1", "rV2", "rU1", "rU2", "rZ1", "rZ2", "rS1", "rS2"),
    "c": REGIME3_VARS,
}


def exchange_subscripts(text: str) -> str:
    """Swap 1<->2 and 3<->4 in every name of a row template."""
    return text.translate(_EXCHANGE)


@dataclass(frozen=True)
class SchemeModel:
    model: LinearGaussianModel
    aux: Tuple[Tuple[str, Tuple[str, ...]], ...]  # auxiliary variable -> latents it is made of
    template: str  # "a", "b" or "c"
    note: str = ""

    def latents_of(self, names: Iterable[str]) -> List[str]:
        aux = dict(self.aux)
        out = []
        for name in names:
            if name not in aux:
                raise ValueError(f"Auxiliary {name} is not defined by the {self.note or self.template} model")
            out += [n for n in aux[name] if n not in out]
        return out


def _combine(*terms: Tuple[Mapping[str, complex], complex]) -> Dict[str, complex]:
    out: Dict[str, complex] = {}
    for coefs, gain in terms:
        for k, c in coefs.items():
            out[k] = out.get(k, 0) + gain * c
    return out


def assemble_model(
    params: GaussParams,
    latents: Mapping[str, float],
    x1: Mapping[str, complex],
    x2: Mapping[str, complex],
    aux: Mapping[str, Sequence[str]],
    template: str,
    note: str = "",
) -> SchemeModel:
    """
    Wire two transmit signals through the channel. Variances are scaled down
    together when a transmit power comes out above one.
    """
    latents = {k: v for k, v in latents.items() if v > 0}
    x1 = {k: c for k, c in x1.items() if k in latents}
    x2 = {k: c for k, c in x2.items() if k in latents}
    g = params.gains()
    observed = {
        "Y1": _combine((x2, params.hC)),
        "Y2": _combine((x1, params.hC)),
        "Y3": _combine((x1, g["13"]), (x2, g["23"])),
        "Y4": _combine((x2, g["24"]), (x1, g["14"])),
    }
    model = LinearGaussianModel.build(latents, observed)
    power = max(model.power(x1), model.power(x2))
    if power > 1.0 + POWER_TOL:
        warnings.warn(f"{note or template} allocation uses power {power:.6g}; rescaling the variances")
        model = model.scaled(1.0 / power)
    full_aux = {name: tuple(n for n in members if n in latents) for name, members in aux.items()}
    full_aux.update({"X1": tuple(x1), "X2": tuple(x2)})
    for name in ("W", "U1", "U2", "S1", "S2", "V1", "V2", "Z1", "Z2"):
        full_aux.setdefault(name, ())
    return SchemeModel(model, tuple(full_aux.items()), template, note)


def _regime1_signals(params: GaussParams, h_eff: float, cooperative: bool = True):
    h13, h14, h23, h24, _ = params.magnitudes
    K = K_REGIME_I if cooperative else K_NO_COOPERATION
    v = 1.0 / K if cooperative else 0.0
    latents = {
        "V1": v,
        "V2": v,
        "U1": 1.0 / (K * max(1.0, h_eff ** 2)),
        "U2": 1.0 / (K * max(1.0, h_eff ** 2)),
        "Z1": 1.0 / (K * max(1.0, h14 ** 2)),
        "Z2": 1.0 / (K * max(1.0, h23 ** 2)),
    }
    aux = {name: (name,) for name in latents}
    x1 = {"V1": 1, "U1": 1, "Z1": 1}
    x2 = {"V2": 1, "U2": 1, "Z2": 1}
    return K, latents, x1, x2, aux


def regime1_model(params: GaussParams, h_eff: float, cooperative: bool = True) -> SchemeModel:
    """
    The cooperative-public allocation, with the public-message power set by the
    cooperation strength h_eff the scheme is designed for. Without cooperation
    the V signals are switched off.
    """
    _, latents, x1, x2, aux = _regime1_signals(params, h_eff, cooperative)
    note = "regime-I allocation" if cooperative else "no cooperation"
    return assemble_model(params, latents, x1, x2, aux, "a", note)


def _ratio(a: float, b: float) -> float:
    # wherever this is used, b == 0 forces a == 0
    return a / b if b > 0 else 0.0


def _precode_for_3(params: GaussParams, K: float):
    """
    Source 1's cooperative-private signal for destination 3, zero-forced at
    destination 4. Returns latents and the contributions to x1 and x2.
    """
    h13, h14, h23, h24, _ = params.magnitudes
    ph = cmath.exp(0.5j * params.theta)
    latents = {"Sperp23": 1.0 / (K * max(1.0, h24 ** 2))}
    if h24 >= h14:
        latents["St13"] = 1.0 / K
        x1 = {"St13": 1}
        x2 = {"St13": -_ratio(h14, h24) * ph, "Sperp23": 1}
        s1 = ("St13", "Sperp23")
    else:
        latents["St23"] = 1.0 / K
        x1 = {"St23": -(h24 / h14) * ph.conjugate()}
        x2 = {"St23": 1, "Sperp23": 1}
        s1 = ("St23", "Sperp23")
    return latents, x1, x2, s1


def _precode_for_4(params: GaussParams, K: float):
    h13, h14, h23, h24, _ = params.magnitudes
    ph = cmath.exp(0.5j * params.theta)
    latents = {"Sperp14": 1.0 / (K * max(1.0, h13 ** 2))}
    if h13 >= h23:
        latents["St24"] = 1.0 / K
        x2 = {"St24": 1}
        x1 = {"St24": -_ratio(h23, h13) * ph, "Sperp14": 1}
        s2 = ("St24", "Sperp14")
    else:
        latents["St14"] = 1.0 / K
        x2 = {"St14": -(h13 / h23) * ph.conjugate()}
        x1 = {"St14": 1, "Sperp14": 1}
        s2 = ("St14", "Sperp14")
    return latents, x1, x2, s2


def _regime3_signals(params: GaussParams, h_prime_C: float):
    h13, h14, h23, h24, _ = params.magnitudes
    K = K_REGIME_III_CASE1 if h24 >= h14 else K_REGIME_III_CASE2
    s_latents, s_x1, s_x2, s1 = _precode_for_3(params, K)
    latents = {
        "V1": 1.0 / K,
        "V2": 1.0 / K,
        "U2": 1.0 / (K * max(1.0, h_prime_C ** 2)),
        "Z1": 1.0 / (K * max(1.0, h14 ** 2)),
        "Z2": 1.0 / (K * max(1.0, h23 ** 2)),
        "Sp1": 1.0 / (K * max(1.0, h13 ** 2, h14 ** 2)),
        **s_latents,
    }
    x1 = _combine(({"V1": 1, "Z1": 1, "Sp1": 1}, 1), (s_x1, 1))
    x2 = _combine(({"V2": 1, "U2": 1, "Z2": 1}, 1), (s_x2, 1))
    aux = {"V1": ("V1",), "V2": ("V2",), "U2": ("U2",), "Z1": ("Z1",), "Z2": ("Z2",), "S1": s1}
    return K, latents, x1, x2, aux


def regime3_model(params: GaussParams, h_prime_C: float) -> SchemeModel:
    """
    Moderate cooperation, written for n13 <= nC <= n24: U1 is constant and only
    source 1 sends a cooperative-private signal.
    """
    _, latents, x1, x2, aux = _regime3_signals(params, h_prime_C)
    case = "|h24|>=|h14|" if params.h24 >= params.h14 else "|h24|<|h14|"
    return assemble_model(params, latents, x1, x2, aux, "c", f"regime-III precoding ({case})")


def _regime4_signals(params: GaussParams):
    h13, h14, h23, h24, _ = params.magnitudes
    K = K_REGIME_IV
    l3, x1_3, x2_3, s1 = _precode_for_3(params, K)
    l4, x1_4, x2_4, s2 = _precode_for_4(params, K)
    latents = {
        "V1": 1.0 / K,
        "V2": 1.0 / K,
        "Z1": 1.0 / (K * max(1.0, h14 ** 2)),
        "Z2": 1.0 / (K * max(1.0, h23 ** 2)),
        "Sp1": 1.0 / (K * max(1.0, h13 ** 2, h14 ** 2)),
        "Sp2": 1.0 / (K * max(1.0, h24 ** 2, h23 ** 2)),
        **l3,
        **l4,
    }
    x1 = _combine(({"V1": 1, "Z1": 1, "Sp1": 1}, 1), (x1_3, 1), (x1_4, 1))
    x2 = _combine(({"V2": 1, "Z2": 1, "Sp2": 1}, 1), (x2_3, 1), (x2_4, 1))
    aux = {"V1": ("V1",), "V2": ("V2",), "Z1": ("Z1",), "Z2": ("Z2",), "S1": s1, "S2": s2}
    return K, latents, x1, x2, aux


def regime4_model(params: GaussParams) -> SchemeModel:
    _, latents, x1, x2, aux = _regime4_signals(params)
    return assemble_model(params, latents, x1, x2, aux, "b", "regime-IV precoding")


def effective_K(K: float, latents: Mapping[str, float], x1: Mapping[str, complex], x2: Mapping[str, complex]) -> float:
    """
    The scale-down K the allocation ends up with once assemble_model has
    brought its transmit powers back to one.
    """
    power = max(sum(abs(c) ** 2 * latents.get(k, 0.0) for k, c in x.items()) for x in (x1, x2))
    return K * power if power > 1.0 + POWER_TOL else K


def mi_system(scheme: SchemeModel) -> ConstraintSystem:
    """Decoding conditions of the scheme's template evaluated on its model."""
    rows_spec, mirrored = TEMPLATES[scheme.template]
    specs = list(rows_spec)
    if mirrored:
        specs += [tuple(exchange_subscripts(part) for part in spec) for spec in rows_spec]
    vars = SCHEME_VARS[scheme.template]
    rows = []
    for lhs, a, b, c in specs:
        A = scheme.latents_of(a.split())
        C = scheme.latents_of(c.split())
        rhs = gaussian_cmi(scheme.model, A, [b], C)
        rows.append(({v: 1 for v in lhs.split("+")}, rhs, f"I({a};{b}|{c})"))
    aux = dict(scheme.aux)
    for v in vars:
        if not aux.get(v[1:]):
            rows.append(({v: 1}, 0.0, f"{v[1:]} constant"))
    return ConstraintSystem.build(vars, rows, rate_groups(vars), clip_negative=True)


def _slackened(row_fn, slack: Mapping[str, float], default: float):
    def rows(*levels):
        return [(coefs, rhs - slack.get(label, default), label) for coefs, rhs, label in row_fn(*levels)]

    return rows


def closed_form_regime1_system(levels) -> ConstraintSystem:
    """The level conditions of the regime-I allocation, reduced by log 5 and log 4."""
    return mirrored_system(_slackened(regime1_rows, {"rV1": LOG5}, LOG4), REGIME1_VARS, tuple(levels))


def _precoding_residual(params: GaussParams) -> float:
    """| |h13||h24| - |h14||h23| e^{j theta} |^2"""
    h13, h14, h23, h24, _ = params.magnitudes
    return abs(h13 * h24 - h14 * h23 * cmath.exp(1j * params.theta)) ** 2


def closed_form_regime3_system(params: GaussParams, levels, n_prime_C: float, h_prime_C: float) -> ConstraintSystem:
    """Written for n13 <= nC <= n24, like regime3_model."""
    h13, h14, h23, h24, _ = params.magnitudes
    n13, n14, n23, n24, nC = levels
    npc = n_prime_C
    z1 = pos(n13 - n14)
    resid = _precoding_residual(params)
    if h24 >= h14:
        slack = LOG7
        core = (h13 / max(1.0, h14)) ** 2 + resid / max(1.0, h24) ** 2 + (h23 / max(1.0, h24)) ** 2
    else:
        slack = LOG6
        core = (h13 / max(1.0, h14)) ** 2 + resid / max(1.0, h14) ** 2 + (h23 / max(1.0, h24)) ** 2
    public = (h23 / max(1.0, h_prime_C)) ** 2
    rows = [
        ({"rU1": 1}, 0.0, "U1 constant"),
        ({"rS1": 1}, pos(nC - max(n13, n14)) - LOG5, "rS1"),
        ({"rV1": 1, "rZ1": 1, "rS1": 1}, nC - LOG5, "decode@2"),
        ({"rV2": 1}, npc - LOG7, "rV2"),
        ({"rZ1": 1}, z1 - LOG7, "rZ1"),
        ({"rU2": 1, "rZ1": 1}, max(z1, n23 - npc) - LOG7, "rU2+rZ1"),
        ({"rS1": 1, "rZ1": 1}, math.log2(1.0 + core) - slack, "rS1+rZ1"),
        ({"rU2": 1, "rS1": 1, "rZ1": 1}, math.log2(1.0 + public + core) - slack, "rU2+rS1+rZ1"),
        ({"rV1": 1, "rV2": 1, "rU2": 1, "rS1": 1, "rZ1": 1}, max(n13, n23) - LOG7, "sum@3"),
        ({"rZ2": 1}, pos(n24 - n23) - LOG8, "rZ2"),
        ({"rU2": 1, "rZ2": 1}, max(pos(n24 - n23), n24 - npc) - LOG8, "rU2+rZ2"),
        ({"rV1": 1, "rV2": 1, "rU2": 1, "rZ2": 1}, max(n24, n14) - LOG8, "sum@4"),
    ]
    return ConstraintSystem.build(REGIME3_VARS, rows, rate_groups(REGIME3_VARS), clip_negative=True)


def _regime4_side(params: GaussParams):
    h13, h14, h23, h24, _ = params.magnitudes
    n13, n14, n23, n24, nC = n_levels(params).levels
    resid = _precoding_residual(params)
    across = max(1.0, h24) if h24 >= h14 else max(1.0, h14)
    core = (h13 / max(1.0, h14)) ** 2 + resid / across ** 2 + (h23 / max(1.0, h24)) ** 2
    z1 = pos(n13 - n14)
    return [
        ({"rS1": 1}, pos(nC - max(n13, n14)) - LOG7, "rS1"),
        ({"rV1": 1, "rZ1": 1, "rS1": 1}, nC - LOG7, "decode@2"),
        ({"rZ1": 1}, z1 - LOG11, "rZ1"),
        ({"rS1": 1, "rZ1": 1}, math.log2(1.0 + core) - LOG11, "rS1+rZ1"),
        ({"rV1": 1, "rV2": 1, "rS1": 1, "rZ1": 1}, max(n13, n23) - LOG11, "sum@3"),
    ]


def closed_form_regime4_system(params: GaussParams) -> ConstraintSystem:
    groups = rate_groups(REGIME4_VARS)
    mine = ConstraintSystem.build(REGIME4_VARS, _regime4_side(params), groups, clip_negative=True)
    theirs = ConstraintSystem.build(REGIME4_VARS, _regime4_side(params.swapped()), groups, clip_negative=True)
    return symmetric_closure(mine, USER_SWAP, mirror=theirs)


def _m(*h: float) -> float:
    return max(1.0, *(x * x for x in h))


def _log1p2(x: float) -> float:
    return math.log2(1.0 + x)


def _raw_regime1_side(params: GaussParams, K: float):
    h13, h14, h23, h24, hC = params.magnitudes
    z1 = h13 ** 2 / (_m(h14) * K)
    u1 = h13 ** 2 / (_m(hC) * K)
    u2 = h23 ** 2 / (_m(hC) * K)
    d = 1.0 / K + 1.0
    return [
        ({"rV1": 1}, _log1p2((hC ** 2 / K) / (2.0 / K + 1.0)), "rV1"),
        ({"rZ1": 1}, _log1p2(z1 / d), "rZ1"),
        ({"rU1": 1, "rZ1": 1}, _log1p2((u1 + z1) / d), "rU1+rZ1"),
        ({"rU2": 1, "rZ1": 1}, _log1p2((z1 + u2) / d), "rU2+rZ1"),
        ({"rU1": 1, "rU2": 1, "rZ1": 1}, _log1p2((u1 + z1 + u2) / d), "rU1+rU2+rZ1"),
        (
            {v: 1 for v in REGIME1_VARS if v != "rZ2"},
            _log1p2((h13 ** 2 / K + u1 + z1 + h23 ** 2 / K + u2) / d),
            "sum@3",
        ),
    ]


def raw_regime1_system(params: GaussParams) -> ConstraintSystem:
    """
    The regime-I allocation at hC with every interference term bounded by its
    variance scale 1/K instead of a level slack. Each row is below the exact
    mutual information of regime1_model(params, params.hC) while nC <= n14 and
    nC <= n23.
    """
    K = effective_K(*_regime1_signals(params, params.hC)[:4])
    groups = rate_groups(REGIME1_VARS)
    mine = ConstraintSystem.build(REGIME1_VARS, _raw_regime1_side(params, K), groups, clip_negative=True)
    theirs = ConstraintSystem.build(REGIME1_VARS, _raw_regime1_side(params.swapped(), K), groups, clip_negative=True)
    return symmetric_closure(mine, USER_SWAP, mirror=theirs)


def raw_regime3_system(params: GaussParams, h_prime_C: float) -> ConstraintSystem:
    """
    Regime-III precoding with the variance-scale conditions, for
    n13 <= nC <= n24 and |h24| >= |h14|.
    """
    h13, h14, h23, h24, hC = params.magnitudes
    if h24 < h14:
        raise ValueError(f"Variance-scale regime-III conditions need |h24| >= |h14|, got {params}")
    K = effective_K(*_regime3_signals(params, h_prime_C)[:4])
    sp = hC ** 2 / (_m(h13, h14) * K)
    z_at_2 = hC ** 2 / (_m(h14) * K)
    z1 = h13 ** 2 / (_m(h14) * K)
    s1 = _ratio(_precoding_residual(params), h24 ** 2) / K + h23 ** 2 / (_m(h24) * K)
    u2 = h23 ** 2 / (_m(h_prime_C) * K)
    d3 = 2.0 / K + 1.0
    d4 = 3.0 / K + 1.0
    z2 = h24 ** 2 / (_m(h23) * K)
    rows = [
        ({"rU1": 1}, 0.0, "U1 constant"),
        ({"rS1": 1}, _log1p2(sp), "rS1"),
        ({"rZ1": 1, "rS1": 1}, _log1p2(sp + z_at_2), "rZ1+rS1"),
        ({"rV1": 1, "rU1": 1, "rZ1": 1, "rS1": 1}, _log1p2(hC ** 2 / K + sp + z_at_2), "decode@2"),
        ({"rV2": 1}, _log1p2((hC ** 2 / K) / (hC ** 2 / (_m(h_prime_C) * K) + hC ** 2 / (_m(h23) * K) + 1.0)), "rV2"),
        ({"rZ1": 1}, _log1p2(z1 / d3), "rZ1"),
        ({"rU2": 1, "rZ1": 1}, _log1p2((z1 + u2) / d3), "rU2+rZ1"),
        ({"rS1": 1, "rZ1": 1}, _log1p2((z1 + s1) / d3), "rS1+rZ1"),
        ({"rU2": 1, "rS1": 1, "rZ1": 1}, _log1p2((z1 + s1 + u2) / d3), "rU2+rS1+rZ1"),
        (
            {"rV1": 1, "rV2": 1, "rU2": 1, "rS1": 1, "rZ1": 1},
            _log1p2((h13 ** 2 / K + z1 + s1 + h23 ** 2 / K + u2) / d3),
            "sum@3",
        ),
        ({"rZ2": 1}, _log1p2(z2 / d4), "rZ2"),
        ({"rU2": 1, "rZ2": 1}, _log1p2((h24 ** 2 / (_m(h_prime_C) * K) + z2) / d4), "rU2+rZ2"),
        (
            {"rV1": 1, "rV2": 1, "rU2": 1, "rZ2": 1},
            _log1p2((h24 ** 2 / K + h24 ** 2 / (_m(h_prime_C) * K) + z2 + h14 ** 2 / K) / d4),
            "sum@4",
        ),
    ]
    return ConstraintSystem.build(REGIME3_VARS, rows, rate_groups(REGIME3_VARS), clip_negative=True)


def _raw_regime4_side(params: GaussParams, K: float):
    h13, h14, h23, h24, hC = params.magnitudes
    sp = hC ** 2 / (_m(h13, h14) * K)
    z_at_2 = hC ** 2 / (_m(h14) * K)
    across = h24 if h24 >= h14 else h14
    core = (h13 ** 2 / _m(h14) + _ratio(_precoding_residual(params), across ** 2) + h23 ** 2 / _m(h24)) / K
    d = 4.0 / K + 1.0
    return [
        ({"rS1": 1}, _log1p2(sp), "rS1"),
        ({"rZ1": 1, "rS1": 1}, _log1p2(z_at_2 + sp), "rZ1+rS1"),
        ({"rV1": 1, "rZ1": 1, "rS1": 1}, _log1p2(hC ** 2 / K + z_at_2 + sp), "decode@2"),
        ({"rZ1": 1}, _log1p2(h13 ** 2 / (_m(h14) * K) / d), "rZ1"),
        ({"rS1": 1, "rZ1": 1}, _log1p2(core / d), "rS1+rZ1"),
        ({"rV1": 1, "rV2": 1, "rS1": 1, "rZ1": 1}, _log1p2((h13 ** 2 / K + h23 ** 2 / K + core) / d), "sum@3"),
    ]


def raw_regime4_system(params: GaussParams) -> ConstraintSystem:
    """Regime-IV precoding with the variance-scale conditions, both sides."""
    K = effective_K(*_regime4_signals(params)[:4])
    groups = rate_groups(REGIME4_VARS)
    mine = ConstraintSystem.build(REGIME4_VARS, _raw_regime4_side(params, K), groups, clip_negative=True)
    theirs = ConstraintSystem.build(REGIME4_VARS, _raw_regime4_side(params.swapped(), K), groups, clip_negative=True)
    return symmetric_closure(mine, USER_SWAP, mirror=theirs)


def _swap_back(system: ConstraintSystem) -> ConstraintSystem:
    system = rename(system, {**USER_SWAP, **{v: k for k, v in USER_SWAP.items()}})
    return ConstraintSystem.build(system.vars, system.rows, rate_groups(system.vars))


def level_magnitude(n: float) -> float:
    """The magnitude whose level [log2 h^2]_+ is n."""
    return 2.0 ** (n / 2.0)


@dataclass(frozen=True)
class Candidate:
    branch: str
    system: ConstraintSystem
    path: str  # "mutual-information" or "closed-form"
    cooperative: bool = False  # a regime-I cooperative-public allocation


@dataclass(frozen=True)
class GaussAchievement:
    rate: float
    branch: str
    regime: Regime
    system: ConstraintSystem
    mi_rate: float
    closed_form_rate: float
    n_prime_C: Optional[int] = None
    cooperative_rate: Optional[float] = None  # best regime-I cooperative branch, when cooperation helps in regime I

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "branch": self.branch,
            "regime": str(self.regime),
            "mi_rate": self.mi_rate,
            "closed_form_rate": self.closed_form_rate,
            "n_prime_C": self.n_prime_C,
            "cooperative_rate": self.cooperative_rate,
            "system": self.system.to_dict(),
        }


def _oriented(params: GaussParams, regime: Regime) -> Tuple[GaussParams, bool]:
    swap = regime.swap_applied or (regime.tag == "IV" and n_levels(params).n24 < n_levels(params).n13)
    return (params.swapped() if swap else params), swap


def candidates(params: GaussParams) -> Tuple[List[Candidate], Regime, Optional[int]]:
    """Every instantiation the Gaussian dispatcher compares, with the regime and n'_C."""
    real = n_levels(params)
    ints = n_levels(params, integer=True).levels
    regime = classify_levels(real.levels)
    out: List[Candidate] = []

    out.append(Candidate("no cooperation", mi_system(regime1_model(params, 0.0, cooperative=False)), "mutual-information"))
    top = min(ints[4], min(ints[:4]))
    m_star = choose_n_prime_C(ints, top).value
    out.append(Candidate("regime-I allocation at hC", mi_system(regime1_model(params, params.hC)), "mutual-information", True))
    for m in sorted({m_star, min(m_star + 1, top), top}):
        out.append(
            Candidate(
                f"regime-I allocation at nC={m}",
                mi_system(regime1_model(params, level_magnitude(m))),
                "mutual-information",
                True,
            )
        )

    helps = cooperation_condition_holds(ints)
    if regime.tag == "I":
        nC = real.nC if helps else 0.0
        out.append(Candidate("regime-I level conditions", closed_form_regime1_system(real.levels[:4] + (nC,)), "closed-form", helps))
        if helps:
            out.append(Candidate("regime-I variance-scale conditions", raw_regime1_system(params), "closed-form", True))
    elif regime.tag == "II":
        nmin = min(real.levels[:4])
        out.append(Candidate("regime-I level conditions at nC=nmin", closed_form_regime1_system(real.levels[:4] + (nmin,)), "closed-form"))

    n_prime_C = None
    if regime.tag in ("III", "IV"):
        work, swap = _oriented(params, regime)
        work_ints = n_levels(work, integer=True).levels
        cap = min(work_ints[4], work_ints[2])
        n_prime_C = choose_n_prime_C(work_ints, cap).value
        for npc in sorted({n_prime_C, min(n_prime_C + 1, cap)}):
            system = mi_system(regime3_model(work, level_magnitude(npc)))
            out.append(Candidate(f"regime-III precoding at n'C={npc}", _swap_back(system) if swap else system, "mutual-information"))
        if regime.tag == "III":
            system = closed_form_regime3_system(work, n_levels(work).levels, n_prime_C, level_magnitude(n_prime_C))
            out.append(Candidate("regime-III level conditions", _swap_back(system) if swap else system, "closed-form"))
            if work.h24 >= work.h14:
                system = raw_regime3_system(work, level_magnitude(n_prime_C))
                out.append(Candidate("regime-III variance-scale conditions", _swap_back(system) if swap else system, "closed-form"))
    if regime.tag == "IV":
        out.append(Candidate("regime-IV precoding", mi_system(regime4_model(params)), "mutual-information"))
        out.append(Candidate("regime-IV level conditions", closed_form_regime4_system(params), "closed-form"))
        out.append(Candidate("regime-IV variance-scale conditions", raw_regime4_system(params), "closed-form"))
    return out, regime, n_prime_C


def gauss_achievable_sum_rate(params: GaussParams) -> Tuple[float, GaussAchievement]:
    found, regime, n_prime_C = candidates(params)
    best = {}
    cooperative = None
    winner = None
    for cand in found:
        res = max_sum_rate(cand.system)
        if res.status != LP_OPTIMAL:
            raise RuntimeError(f"{cand.branch} system for {params} is {res.status}")
        value = float(res.optimum)
        best[cand.path] = max(best.get(cand.path, 0.0), value)
        if cand.cooperative:
            cooperative = value if cooperative is None else max(cooperative, value)
        if winner is None or value > winner[1]:
            winner = (cand, value)
    cand, rate = winner
    helps = regime.tag == "I" and cooperation_condition_holds(n_levels(params, integer=True).levels)
    detail = GaussAchievement(
        rate=rate,
        branch=f"{cand.path}: {cand.branch}",
        regime=regime,
        system=cand.system,
        mi_rate=best.get("mutual-information", 0.0),
        closed_form_rate=best.get("closed-form", 0.0),
        n_prime_C=n_prime_C,
        cooperative_rate=cooperative if helps else None,
    )
    return rate, detail


def gauss_rate_choice_regime1(params: GaussParams) -> Dict[str, float]:
    """
    The explicit regime-I rates: the deterministic choice on the real levels
    reduced by log 4 (log 5 for the cooperative-public rates) and clipped at 0.
    """
    real = n_levels(params).levels
    n13, n14, n23, n24, nC = real
    if classify_levels(real).tag != "I":
        raise ValueError(f"{params} is not in regime I")
    base = {
        "rV1": nC,
        "rV2": nC,
        "rU1": max(n24 - n23, n14 - nC) - pos(n24 - n23),
        "rU2": max(n13 - n14, n23 - nC) - pos(n13 - n14),
        "rZ1": pos(n13 - n14),
        "rZ2": pos(n24 - n23),
    }
    unslackened = mirrored_system(regime1_rows, REGIME1_VARS, real)
    if not check_feasible(unslackened, base, tol=1e-9):
        raise ValueError(f"Cooperation level of {params} is outside the range where the regime-I choice applies")
    return {v: max(r - (LOG5 if v.startswith("rV") else LOG4), 0.0) for v, r in base.items()}
