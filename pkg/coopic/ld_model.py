from dataclasses import dataclass, replace
from typing import Iterable, Tuple

DEFAULT_PRIME = 3  # characteristic != 2 so every worked scheme runs as-is


def is_prime(p: int) -> bool:
    if not isinstance(p, int) or p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def _check_prime(p: int):
    if not is_prime(p):
        raise ValueError(f"Field size must be a prime, got {p}")


@dataclass(frozen=True)
class FieldElement:
    value: int
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        _check_prime(self.p)
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ValueError(f"Cannot mix GF({self.p}) and GF({other.p}) elements")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FieldElement(self._coerce(other) - self.value, self.p)

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return FieldElement(pow(self.value, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        return self * FieldElement(self._coerce(other), self.p).inverse()

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value}"


@dataclass(frozen=True)
class LdVector:
    """A column of n levels over GF(p); level 1 is the top (most significant) one."""

    values: Tuple[int, ...]
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        _check_prime(self.p)
        object.__setattr__(self, "values", tuple(int(v) % self.p for v in self.values))

    @classmethod
    def of(cls, entries: Iterable, p: int = DEFAULT_PRIME) -> "LdVector":
        return cls(tuple(int(e) for e in entries), p)

    @classmethod
    def zeros(cls, n: int, p: int = DEFAULT_PRIME) -> "LdVector":
        return cls((0,) * n, p)

    def __len__(self):
        return len(self.values)

    @property
    def entries(self) -> Tuple[FieldElement, ...]:
        return tuple(FieldElement(v, self.p) for v in self.values)

    def level(self, i: int) -> FieldElement:
        if not 1 <= i <= len(self.values):
            raise ValueError(f"Level {i} outside 1..{len(self.values)}")
        return FieldElement(self.values[i - 1], self.p)

    def _check_compatible(self, other: "LdVector"):
        if len(other) != len(self) or other.p != self.p:
            raise ValueError(
                f"Vector mismatch: length {len(self)}/GF({self.p}) vs length {len(other)}/GF({other.p})"
            )

    def __add__(self, other: "LdVector") -> "LdVector":
        self._check_compatible(other)
        return LdVector(tuple(a + b for a, b in zip(self.values, other.values)), self.p)

    def __sub__(self, other: "LdVector") -> "LdVector":
        self._check_compatible(other)
        return LdVector(tuple(a - b for a, b in zip(self.values, other.values)), self.p)

    def scale(self, c: int) -> "LdVector":
        return LdVector(tuple(c * a for a in self.values), self.p)

    def is_zero(self) -> bool:
        return not any(self.values)

    def tolist(self):
        return list(self.values)


@dataclass(frozen=True)
class LdParams:
    n13: int  # source 1 -> destination 3 (direct)
    n14: int  # source 1 -> destination 4 (cross)
    n23: int  # source 2 -> destination 3 (cross)
    n24: int  # source 2 -> destination 4 (direct)
    nC: int   # source <-> source, reciprocal
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        for name in ("n13", "n14", "n23", "n24", "nC"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
        _check_prime(self.p)

    @property
    def n(self) -> int:
        return max(self.n13, self.n14, self.n23, self.n24, self.nC)

    @property
    def levels(self) -> Tuple[int, int, int, int, int]:
        return (self.n13, self.n14, self.n23, self.n24, self.nC)

    @property
    def nmin(self) -> int:
        return min(self.n13, self.n14, self.n23, self.n24)

    def swapped(self) -> "LdParams":
        """Relabel sources 1<->2 and destinations 3<->4."""
        return LdParams(self.n24, self.n23, self.n14, self.n13, self.nC, self.p)

    def with_nC(self, nC: int) -> "LdParams":
        return replace(self, nC=nC)

    def __str__(self):
        return f"({self.n13},{self.n14},{self.n23},{self.n24},{self.nC})"


def shift_apply(x: LdVector, m: int) -> LdVector:
    """
    Apply the down-shift S^m: entry i of the output is entry i - m of the input
    for i > m, and zero on the top m levels.
    """
    n = len(x)
    if not 0 <= m <= n:
        raise ValueError(f"Shift {m} outside 0..{n}")
    return LdVector((0,) * m + x.values[: n - m], x.p)


def ld_channel_step(x1: LdVector, x2: LdVector, params: LdParams) -> Tuple[LdVector, LdVector, LdVector, LdVector]:
    """
    One channel use of the linear deterministic source-cooperation channel.

    Returns
    -------
    (y1, y2, y3, y4): what source 1, source 2 and destinations 3 and 4 receive.
    """
    n = params.n
    if len(x1) != n or len(x2) != n:
        raise ValueError(f"Inputs must have length n={n}, got {len(x1)} and {len(x2)}")
    if x1.p != params.p or x2.p != params.p:
        raise ValueError(f"Inputs must live in GF({params.p})")
    y1 = shift_apply(x2, n - params.nC)
    y2 = shift_apply(x1, n - params.nC)
    y3 = shift_apply(x1, n - params.n13) + shift_apply(x2, n - params.n23)
    y4 = shift_apply(x2, n - params.n24) + shift_apply(x1, n - params.n14)
    return y1, y2, y3, y4
