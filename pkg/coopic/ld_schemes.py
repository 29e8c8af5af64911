"""
The three hand-built uncoded schemes on small linear deterministic channels:
block transmission with cooperative signals exchanged between the sources,
and destinations reading the block backwards.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ld_model import DEFAULT_PRIME, FieldElement, LdParams, LdVector, is_prime, ld_channel_step


@dataclass
class MessageStream:
    T: int
    p: int
    symbols: Dict[str, np.ndarray]  # name -> values for slots 0..T+1
    owner: Dict[str, int]  # name -> source (1 or 2)
    forced: Dict[str, frozenset] = field(default_factory=dict)  # slots pinned to zero

    def get(self, name: str, t: int) -> int:
        if not 0 <= t <= self.T + 1:
            return 0
        return int(self.symbols[name][t])

    def carried(self, name: str) -> List[int]:
        """Slots in 1..T that carry a message symbol."""
        return [t for t in range(1, self.T + 1) if t not in self.forced.get(name, ())]


class CausalityError(RuntimeError):
    pass


class EncoderView:
    """What source k may use at slot t: its own messages and y_k(1..t-1)."""

    def __init__(self, k: int, t: int, stream: MessageStream, received: List[LdVector], log: Optional[list] = None):
        self.k = k
        self.t = t
        self._stream = stream
        self._received = received
        self._log = log

    def own(self, name: str, s: int) -> int:
        if self._stream.owner.get(name) != self.k:
            raise CausalityError(f"Source {self.k} asked for message {name} it does not own")
        if self._log is not None:
            self._log.append((self.k, self.t, "own", name, s))
        return self._stream.get(name, s)

    def y(self, s: int) -> LdVector:
        if not 1 <= s < self.t:
            raise CausalityError(f"Source {self.k} asked for y({s}) while encoding slot {self.t}")
        if self._log is not None:
            self._log.append((self.k, self.t, "y", s))
        return self._received[s - 1]


@dataclass
class SimTrace:
    example: int
    params: LdParams
    T: int
    x1: List[LdVector] = field(default_factory=list)
    x2: List[LdVector] = field(default_factory=list)
    y1: List[LdVector] = field(default_factory=list)
    y2: List[LdVector] = field(default_factory=list)
    y3: List[LdVector] = field(default_factory=list)
    y4: List[LdVector] = field(default_factory=list)
    recovered: Dict[int, Dict[str, Dict[int, int]]] = field(default_factory=dict)  # destination -> name -> slot -> value
    own_symbols: Dict[int, int] = field(default_factory=dict)  # destination -> own symbols conveyed
    error_count: int = 0
    audit: Optional[dict] = None

    @property
    def sum_rate(self) -> float:
        return sum(self.own_symbols.values()) / self.T

    def to_dict(self) -> dict:
        slots = []
        for t in range(self.T):
            slots.append(
                {
                    "t": t + 1,
                    **{name: getattr(self, name)[t].tolist() for name in ("x1", "x2", "y1", "y2", "y3", "y4")},
                }
            )
        return {
            "example": self.example,
            "params": dict(zip(("n13", "n14", "n23", "n24", "nC"), self.params.levels), p=self.params.p),
            "T": self.T,
            "slots": slots,
            "recovered": {
                str(dest): {name: {str(t): v for t, v in sorted(vals.items())} for name, vals in syms.items()}
                for dest, syms in self.recovered.items()
            },
            "own_symbols": {str(k): v for k, v in self.own_symbols.items()},
            "sum_rate": self.sum_rate,
            "error_count": self.error_count,
            "audit": self.audit,
        }


class UncodedScheme:
    number: int = 0
    levels: Tuple[int, int, int, int, int] = (0, 0, 0, 0, 0)
    names: Dict[int, Tuple[str, ...]] = {}
    decoded: Dict[int, Tuple[str, ...]] = {}  # destination -> what it reads off
    own: Dict[int, Tuple[str, ...]] = {}  # destination -> its intended messages

    def __init__(self, p: int):
        self.params = LdParams(*self.levels, p=p)
        self.p = p

    def forced_zero(self, name: str, T: int) -> frozenset:
        return frozenset({0, T + 1})

    def learn(self, k: int, view: EncoderView, known: Dict[Tuple[str, int], int]):
        """Update source k's knowledge of partner signals from y_k(t-1)."""
        raise NotImplementedError

    def encode(self, k: int, view: EncoderView, known: Dict[Tuple[str, int], int]) -> Sequence[int]:
        raise NotImplementedError

    def decode(self, dest: int, ys: List[LdVector], T: int) -> Dict[str, Dict[int, int]]:
        raise NotImplementedError

    def inv(self, a: int) -> int:
        return FieldElement(a, self.p).inverse().value


def _partner(k: int) -> int:
    return 2 if k == 1 else 1


class Example1(UncodedScheme):
    """(4,2,2,4,1): cooperative-public v on top, two private levels at the bottom."""

    number = 1
    levels = (4, 2, 2, 4, 1)
    names = {1: ("v1", "z1a", "z1b"), 2: ("v2", "z2a", "z2b")}
    decoded = {3: ("v1", "z1a", "z1b", "v2"), 4: ("v2", "z2a", "z2b", "v1")}
    own = {3: ("v1", "z1a", "z1b"), 4: ("v2", "z2a", "z2b")}

    def forced_zero(self, name, T):
        if name.startswith("z"):
            return frozenset({0, T, T + 1})
        return frozenset({0, T + 1})

    def learn(self, k, view, known):
        j = _partner(k)
        t = view.t
        # bottom level of y_k(t-1) is v_j(t-1) + v_j(t-2)
        known[(f"v{j}", t - 1)] = (view.y(t - 1).values[-1] - known.get((f"v{j}", t - 2), 0)) % self.p

    def encode(self, k, view, known):
        j = _partner(k)
        t = view.t
        return (
            view.own(f"v{k}", t) + view.own(f"v{k}", t - 1),
            known.get((f"v{j}", t - 1), 0),
            view.own(f"z{k}a", t),
            view.own(f"z{k}b", t),
        )

    def decode(self, dest, ys, T):
        k = 1 if dest == 3 else 2
        j = _partner(k)
        p = self.p
        vk, vj, za, zb = {}, {}, {}, {}
        y = ys[T - 1].values
        vk[T - 1] = y[3]
        vj[T - 1] = y[1]
        vk[T] = (y[0] - y[3]) % p
        vj[T] = (y[2] - y[1]) % p
        za[T] = zb[T] = 0
        for t in range(T - 1, 0, -1):
            y = ys[t - 1].values
            vk[t - 1] = (y[0] - vk[t]) % p
            vj[t - 1] = y[1]
            za[t] = (y[2] - vj[t] - vj[t - 1]) % p
            zb[t] = (y[3] - vk[t - 1]) % p
        return {f"v{k}": vk, f"z{k}a": za, f"z{k}b": zb, f"v{j}": vj}


class Example2(UncodedScheme):
    """(6,3,3,4,1): adds a public u1 seen by both destinations."""

    number = 2
    levels = (6, 3, 3, 4, 1)
    names = {1: ("v1", "u1", "z1a", "z1b", "z1c"), 2: ("v2", "z2")}
    decoded = {3: ("v1", "u1", "z1a", "z1b", "z1c", "v2"), 4: ("v2", "z2", "v1", "u1")}
    own = {3: ("v1", "u1", "z1a", "z1b", "z1c"), 4: ("v2", "z2")}

    def forced_zero(self, name, T):
        return frozenset({0, T, T + 1})

    def learn(self, k, view, known):
        j = _partner(k)
        t = view.t
        known[(f"v{j}", t - 1)] = (view.y(t - 1).values[-1] - known.get((f"v{j}", t - 2), 0)) % self.p

    def encode(self, k, view, known):
        t = view.t
        if k == 1:
            u1 = view.own("u1", t)
            return (
                view.own("v1", t) + view.own("v1", t - 1),
                u1 + known.get(("v2", t - 1), 0),
                u1,
                view.own("z1a", t),
                view.own("z1b", t),
                view.own("z1c", t),
            )
        return (
            view.own("v2", t) + view.own("v2", t - 1),
            known.get(("v1", t - 1), 0),
            0,
            view.own("z2", t),
            0,
            0,
        )

    def decode(self, dest, ys, T):
        p = self.p
        v1, v2 = {T: 0}, {T: 0}
        if dest == 3:
            u1, za, zb, zc = {}, {}, {}, {}
            for t in range(T, 0, -1):
                y = ys[t - 1].values
                v1[t - 1] = (y[0] - v1[t]) % p
                u1[t] = y[2]
                v2[t - 1] = (y[1] - u1[t]) % p
                za[t] = (y[3] - v2[t] - v2[t - 1]) % p
                zb[t] = (y[4] - v1[t - 1]) % p
                zc[t] = y[5]
            return {"v1": v1, "u1": u1, "z1a": za, "z1b": zb, "z1c": zc, "v2": v2}
        u1, z2 = {}, {}
        for t in range(T, 0, -1):
            y = ys[t - 1].values
            v2[t - 1] = (y[2] - v2[t]) % p
            u1[t] = (y[4] - v2[t - 1]) % p
            z2[t] = (y[5] - u1[t]) % p
            if p == 2:
                # v1(t) + 2 v1(t-1) collapses to v1(t) in characteristic 2
                v1[t] = y[3]
            else:
                v1[t - 1] = (y[3] - v1[t]) * self.inv(2) % p
        v1.setdefault(0, 0)
        return {"v2": v2, "z2": z2, "v1": v1, "u1": u1}


class Example3(UncodedScheme):
    """(4,3,3,4,5): strong cooperation, cooperative-private s exchanged a slot ahead."""

    number = 3
    levels = (4, 3, 3, 4, 5)
    names = {1: ("v1", "s1", "z1"), 2: ("v2", "s2", "z2")}
    decoded = {3: ("v1", "s1", "z1", "v2"), 4: ("v2", "s2", "z2", "v1")}
    own = {3: ("v1", "s1", "z1"), 4: ("v2", "s2", "z2")}

    def __init__(self, p):
        if p == 2:
            raise ValueError("Example 3 needs a field of characteristic other than 2")
        super().__init__(p)

    def forced_zero(self, name, T):
        if name.startswith("v"):
            return frozenset({0, T, T + 1})
        if name.startswith("s"):
            return frozenset({0, 1, T + 1})
        return frozenset({0, T + 1})

    def learn(self, k, view, known):
        j = _partner(k)
        t = view.t
        y = view.y(t - 1).values  # y_k = x_j since the link is full strength
        known[(f"v{j}", t - 1)] = (y[0] - known.get((f"v{j}", t - 2), 0)) % self.p
        known[(f"s{j}", t)] = y[4]

    def encode(self, k, view, known):
        j = _partner(k)
        t = view.t
        return (
            view.own(f"v{k}", t) + view.own(f"v{k}", t - 1),
            known.get((f"v{j}", t - 1), 0),
            view.own(f"s{k}", t),
            view.own(f"z{k}", t) - known.get((f"s{j}", t), 0),
            view.own(f"s{k}", t + 1),
        )

    def decode(self, dest, ys, T):
        k = 1 if dest == 3 else 2
        j = _partner(k)
        p = self.p
        half = self.inv(2)
        vk, vj, s, z = {T: 0}, {T: 0}, {}, {}
        for t in range(T, 0, -1):
            y = ys[t - 1].values
            vk[t - 1] = (y[1] - vk[t]) % p
            vj[t - 1] = (y[2] - vj[t]) * half % p
            s[t] = (y[3] - vk[t - 1]) % p
            z[t] = y[4]
        return {f"v{k}": vk, f"s{k}": s, f"z{k}": z, f"v{j}": vj}


EXAMPLES = {1: Example1, 2: Example2, 3: Example3}


def make_stream(scheme: UncodedScheme, T: int, seed: int, zero: bool = False) -> MessageStream:
    rng = np.random.default_rng(seed)
    symbols, owner, forced = {}, {}, {}
    for k in (1, 2):
        for name in scheme.names[k]:
            values = np.zeros(T + 2, dtype=np.int64) if zero else rng.integers(0, scheme.p, size=T + 2)
            pinned = scheme.forced_zero(name, T)
            for t in pinned:
                values[t] = 0
            symbols[name] = values
            owner[name] = k
            forced[name] = pinned
    return MessageStream(T, scheme.p, symbols, owner, forced)


def run_example(number: int, T: int, seed: int, p: int = DEFAULT_PRIME, zero: bool = False, audit: bool = False, check: bool = True) -> SimTrace:
    """
    Run one of the worked schemes for T slots.

    Parameters
    ----------
    number: int
        1, 2 or 3.

    zero: bool
        Use all-zero messages instead of seeded uniform symbols.

    audit: bool
        Record every access the encoders make and check the partner symbols each
        source reconstructs from its feedback.

    check: bool
        Raise RuntimeError when a destination decodes a symbol incorrectly.
    """
    if number not in EXAMPLES:
        raise ValueError(f"No worked example {number}; choose one of {sorted(EXAMPLES)}")
    if not is_prime(p):
        raise ValueError(f"Field size must be a prime, got {p}")
    if T < 2:
        raise ValueError(f"Block length T must be at least 2, got {T}")
    scheme = EXAMPLES[number](p)
    stream = make_stream(scheme, T, seed, zero)
    params = scheme.params
    n = params.n
    trace = SimTrace(number, params, T)
    received = {1: [], 2: []}
    known = {1: {}, 2: {}}
    log = [] if audit else None

    for t in range(1, T + 1):
        xs = {}
        for k in (1, 2):
            view = EncoderView(k, t, stream, received[k], log)
            if t >= 2:
                scheme.learn(k, view, known[k])
            xs[k] = LdVector.of(scheme.encode(k, view, known[k]), p)
            assert len(xs[k]) == n
        y1, y2, y3, y4 = ld_channel_step(xs[1], xs[2], params)
        received[1].append(y1)
        received[2].append(y2)
        trace.x1.append(xs[1])
        trace.x2.append(xs[2])
        trace.y1.append(y1)
        trace.y2.append(y2)
        trace.y3.append(y3)
        trace.y4.append(y4)

    errors = 0
    for dest, ys in ((3, trace.y3), (4, trace.y4)):
        got = scheme.decode(dest, ys, T)
        trace.recovered[dest] = got
        for name in scheme.decoded[dest]:
            for t in stream.carried(name):
                if got[name].get(t) != stream.get(name, t):
                    errors += 1
        trace.own_symbols[dest] = sum(len(stream.carried(name)) for name in scheme.own[dest])
    trace.error_count = errors

    if audit:
        wrong = sum(1 for k in (1, 2) for (name, s), v in known[k].items() if v != stream.get(name, s))
        trace.audit = {"accesses": len(log), "late_reads": sum(1 for e in log if e[2] == "y" and e[3] >= e[1]), "partner_mismatches": wrong}
        if wrong:
            raise RuntimeError(f"Example {number}: sources reconstructed {wrong} partner symbols incorrectly")
    if check and errors:
        raise RuntimeError(f"Example {number}: {errors} symbols decoded incorrectly (T={T}, seed={seed}, p={p})")
    return trace


def run_example1(T: int, seed: int, p: int = DEFAULT_PRIME, **kwargs) -> SimTrace:
    return run_example(1, T, seed, p, **kwargs)


def run_example2(T: int, seed: int, p: int = DEFAULT_PRIME, **kwargs) -> SimTrace:
    return run_example(2, T, seed, p, **kwargs)


def run_example3(T: int, seed: int, p: int = DEFAULT_PRIME, **kwargs) -> SimTrace:
    return run_example(3, T, seed, p, **kwargs)
