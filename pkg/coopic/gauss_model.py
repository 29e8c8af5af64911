"""
Gaussian channel parameters after the phase reduction, and a mutual
information engine over jointly Gaussian variables given by linear models.
"""
import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .utils import db_to_magnitude, pos

RECIPROCITY_TOL = 1e-12
PSEUDO_DET_RTOL = 1e-12
TWO_PI = 2.0 * math.pi


def _reduce_angle(theta: float) -> float:
    theta = math.fmod(theta, TWO_PI)
    if theta < 0:
        theta += TWO_PI
    # fmod of values just below a multiple of 2*pi can round up onto it
    return 0.0 if theta >= TWO_PI else theta


@dataclass(frozen=True)
class GaussParams:
    h13: float
    h14: float
    h23: float
    h24: float
    hC: float
    theta: float = 0.0  # arg(h14) + arg(h23) - arg(h13) - arg(h24), in [0, 2*pi)

    def __post_init__(self):
        for name in ("h13", "h14", "h23", "h24", "hC"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be a finite non-negative magnitude, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")
        object.__setattr__(self, "theta", _reduce_angle(float(self.theta)))

    @classmethod
    def from_db(cls, h13_db, h14_db, h23_db, h24_db, hC_db, theta: float = 0.0) -> "GaussParams":
        """Magnitudes given as link SNRs 20*log10|h| in dB."""
        return cls(*(db_to_magnitude(d) for d in (h13_db, h14_db, h23_db, h24_db, hC_db)), theta)

    @property
    def magnitudes(self) -> Tuple[float, float, float, float, float]:
        return (self.h13, self.h14, self.h23, self.h24, self.hC)

    def swapped(self) -> "GaussParams":
        """Relabel sources 1<->2 and destinations 3<->4; theta is unchanged."""
        return GaussParams(self.h24, self.h23, self.h14, self.h13, self.hC, self.theta)

    def gains(self) -> Dict[str, complex]:
        """Complex gains in the reduced form: direct links real, cross links carry e^{j theta/2}."""
        half = cmath.exp(0.5j * self.theta)
        return {"13": complex(self.h13), "24": complex(self.h24), "14": self.h14 * half, "23": self.h23 * half}


def normalize_channel(h13: complex, h14: complex, h23: complex, h24: complex, h12: complex, h21: complex) -> GaussParams:
    """
    Reduce five complex coefficients to magnitudes plus the one phase that
    matters.
    """
    values = (h13, h14, h23, h24, h12, h21)
    if not all(cmath.isfinite(complex(h)) for h in values):
        raise ValueError(f"Channel coefficients must be finite, got {values}")
    if abs(abs(h12) - abs(h21)) > RECIPROCITY_TOL * max(1.0, abs(h12)):
        raise ValueError(f"Cooperation link is not reciprocal: |h12|={abs(h12)!r}, |h21|={abs(h21)!r}")
    theta = cmath.phase(h14) + cmath.phase(h23) - cmath.phase(h13) - cmath.phase(h24)
    return GaussParams(abs(h13), abs(h14), abs(h23), abs(h24), abs(h12), theta)


@dataclass(frozen=True)
class NLevels:
    n13: float
    n14: float
    n23: float
    n24: float
    nC: float

    @property
    def levels(self) -> Tuple[float, float, float, float, float]:
        return (self.n13, self.n14, self.n23, self.n24, self.nC)


def level_of(h: float) -> float:
    """[log2 |h|^2]_+"""
    return pos(2.0 * math.log2(h)) if h > 0 else 0.0


def n_levels(params: GaussParams, integer: bool = False) -> NLevels:
    """
    Parameters
    ----------
    integer: bool
        Floor every level, giving the integer tuple the deterministic model uses.
    """
    levels = [level_of(h) for h in params.magnitudes]
    if integer:
        levels = [int(math.floor(n + 1e-12)) for n in levels]
    return NLevels(*levels)


@dataclass(frozen=True)
class LinearGaussianModel:
    """
    Independent zero-mean circularly-symmetric latents, and observed variables
    that are complex-linear combinations of them plus independent noise.
    """

    latents: Tuple[Tuple[str, float], ...]  # (name, variance)
    observed: Tuple[Tuple[str, Tuple[Tuple[str, complex], ...], float], ...]  # (name, coefficients, noise variance)
    _index: Dict[str, int] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        names = [n for n, _ in self.latents] + [n for n, _, _ in self.observed]
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate variable names in {names}")
        latent_names = {n for n, _ in self.latents}
        for name, var in self.latents:
            if not var >= 0:
                raise ValueError(f"Latent {name} has negative variance {var!r}")
        for name, coefs, noise in self.observed:
            if not noise >= 0:
                raise ValueError(f"Observed {name} has negative noise variance {noise!r}")
            for latent, _ in coefs:
                if latent not in latent_names:
                    raise ValueError(f"Observed {name} references undeclared latent {latent}")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @classmethod
    def build(cls, latents: Mapping[str, float], observed: Mapping[str, Mapping[str, complex]], noise: Optional[Mapping[str, float]] = None) -> "LinearGaussianModel":
        noise = noise or {}
        return cls(
            tuple((n, float(v)) for n, v in latents.items()),
            tuple(
                (n, tuple((k, complex(c)) for k, c in coefs.items() if c != 0), float(noise.get(n, 1.0)))
                for n, coefs in observed.items()
            ),
        )

    @property
    def variables(self) -> List[str]:
        return [n for n, _ in self.latents] + [n for n, _, _ in self.observed]

    @property
    def variances(self) -> Dict[str, float]:
        return dict(self.latents)

    def coefficients(self, name: str) -> Dict[str, complex]:
        for n, coefs, _ in self.observed:
            if n == name:
                return dict(coefs)
        raise KeyError(name)

    def noise(self, name: str) -> float:
        for n, _, noise in self.observed:
            if n == name:
                return noise
        raise KeyError(name)

    def is_latent(self, name: str) -> bool:
        return name in self._index and self._index[name] < len(self.latents)

    def power(self, coefs: Mapping[str, complex]) -> float:
        var = self.variances
        return sum(abs(c) ** 2 * var[k] for k, c in coefs.items())

    def scaled(self, factor: float) -> "LinearGaussianModel":
        """Every latent variance multiplied by factor; noise untouched."""
        return LinearGaussianModel(tuple((n, v * factor) for n, v in self.latents), self.observed)


def covariance_of(model: LinearGaussianModel) -> np.ndarray:
    """Covariance E[a b^*] over model.variables (latents first, then observed)."""
    latent_names = [n for n, _ in model.latents]
    L = len(latent_names)
    # every variable as a row of loadings on (latents, noises)
    loadings = np.zeros((L + len(model.observed), L + len(model.observed)), dtype=complex)
    scale = np.zeros(L + len(model.observed))
    for i, (_, var) in enumerate(model.latents):
        loadings[i, i] = 1.0
        scale[i] = var
    index = {n: i for i, n in enumerate(latent_names)}
    for j, (_, coefs, noise) in enumerate(model.observed):
        for latent, c in coefs:
            loadings[L + j, index[latent]] = c
        loadings[L + j, L + j] = 1.0
        scale[L + j] = noise
    sigma = (loadings * scale) @ loadings.conj().T
    return 0.5 * (sigma + sigma.conj().T)


def _names(group: Iterable[str]) -> List[str]:
    out = []
    for n in group:
        if n not in out:
            out.append(n)
    return out


def _submatrix(sigma: np.ndarray, model: LinearGaussianModel, rows: Sequence[str], cols: Sequence[str]) -> np.ndarray:
    try:
        ri = [model._index[n] for n in rows]
        ci = [model._index[n] for n in cols]
    except KeyError as e:
        raise ValueError(f"Unknown variable {e.args[0]}") from e
    return sigma[np.ix_(ri, ci)]


def conditional_covariance(model: LinearGaussianModel, A: Iterable[str], C: Iterable[str], sigma: Optional[np.ndarray] = None) -> np.ndarray:
    """Covariance of A given C, the Schur complement with a pseudo-inverse."""
    A, C = _names(A), [n for n in _names(C)]
    sigma = covariance_of(model) if sigma is None else sigma
    s_aa = _submatrix(sigma, model, A, A)
    if not C:
        return s_aa
    s_ac = _submatrix(sigma, model, A, C)
    s_cc = _submatrix(sigma, model, C, C)
    out = s_aa - s_ac @ np.linalg.pinv(s_cc, rcond=PSEUDO_DET_RTOL, hermitian=True) @ s_ac.conj().T
    return 0.5 * (out + out.conj().T)


def _log2_pdet(matrix: np.ndarray, scale: float) -> Tuple[float, int]:
    """log2 pseudo-determinant and rank, with eigenvalues below rtol*scale dropped."""
    if matrix.size == 0:
        return 0.0, 0
    eig = np.linalg.eigvalsh(matrix)
    keep = eig > PSEUDO_DET_RTOL * max(scale, 1.0)
    return float(np.sum(np.log2(eig[keep]))), int(np.count_nonzero(keep))


def _residual_variance(model: LinearGaussianModel, observed: str, known: set) -> float:
    var = model.variances
    coefs = model.coefficients(observed)
    return sum(abs(c) ** 2 * var[k] for k, c in coefs.items() if k not in known) + model.noise(observed)


def gaussian_cmi(model: LinearGaussianModel, A: Iterable[str], B: Iterable[str], C: Iterable[str] = ()) -> float:
    """
    I(A; B | C) in bits.

    When A and C only hold latents and B is a single observed variable, the
    conditional variances are read off the coefficients directly. Otherwise the
    general log-det difference over Schur complements is used, with deterministic
    directions handled through pseudo-determinants.
    """
    A, B, C = _names(A), _names(B), _names(C)
    if not B or not A:
        return 0.0
    if len(B) == 1 and not model.is_latent(B[0]) and all(model.is_latent(n) for n in A + C):
        known = set(C)
        before = _residual_variance(model, B[0], known)
        after = _residual_variance(model, B[0], known | set(A))
        if after <= PSEUDO_DET_RTOL * max(before, 1.0):
            if before <= PSEUDO_DET_RTOL:
                return 0.0
            raise ValueError(f"I({A};{B}|{C}) is unbounded: {B[0]} is determined by the conditioning")
        return max(math.log2(before / after), 0.0)

    sigma = covariance_of(model)
    given_c = conditional_covariance(model, B, C, sigma)
    given_ac = conditional_covariance(model, B, [n for n in A if n not in C] + C, sigma)
    scale = float(np.max(np.abs(np.diag(given_c)))) if given_c.size else 1.0
    logdet_c, rank_c = _log2_pdet(given_c, scale)
    logdet_ac, rank_ac = _log2_pdet(given_ac, scale)
    if rank_ac < rank_c:
        raise ValueError(f"I({A};{B}|{C}) is unbounded: numerically singular beyond the pseudo-determinant threshold")
    value = logdet_c - logdet_ac
    if not math.isfinite(value):
        raise RuntimeError(f"Non-finite mutual information for I({A};{B}|{C})")
    return max(value, 0.0)
