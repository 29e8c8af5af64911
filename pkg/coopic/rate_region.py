"""
Achievable rate regions as systems of linear inequalities over non-negative
rate variables: exact Fourier-Motzkin projection, sum-rate maximization and
the subscript-exchange closure.
"""
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

Number = Union[int, Fraction, float]
RateVar = str  # e.g. "rV1", "rU2", "rZ1", "rS1"

FLOAT_TOL = 1e-9
BRUTEFORCE_MAX_VARS = 8

LP_OPTIMAL = "optimal"
LP_INFEASIBLE = "infeasible"
LP_UNBOUNDED = "unbounded"


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _exact(x: Number) -> Number:
    return Fraction(x) if isinstance(x, int) else x


@dataclass(frozen=True)
class Row:
    coefs: Tuple[Tuple[RateVar, Number], ...]  # sorted by name, zero coefficients dropped
    rhs: Number
    label: str = field(default="", compare=False)

    @classmethod
    def make(cls, coefs: Mapping[RateVar, Number], rhs: Number, label: str = "") -> "Row":
        items = tuple(sorted((v, _exact(c)) for v, c in coefs.items() if c != 0))
        return cls(items, _exact(rhs), label)

    def coef(self, var: RateVar) -> Number:
        for v, c in self.coefs:
            if v == var:
                return c
        return 0

    @property
    def names(self) -> Tuple[RateVar, ...]:
        return tuple(v for v, _ in self.coefs)

    def lhs(self, point: Mapping[RateVar, Number]) -> Number:
        return sum((c * point.get(v, 0) for v, c in self.coefs), Fraction(0))

    def renamed(self, mapping: Mapping[RateVar, RateVar]) -> "Row":
        return Row.make({mapping.get(v, v): c for v, c in self.coefs}, self.rhs, self.label)

    def __str__(self):
        lhs = " + ".join(f"{'' if c == 1 else str(c) + '*'}{v}" for v, c in self.coefs) or "0"
        return f"{lhs} <= {self.rhs}"


@dataclass(frozen=True)
class ConstraintSystem:
    vars: Tuple[RateVar, ...]
    rows: Tuple[Row, ...]
    objective_groups: Tuple[Tuple[str, Tuple[RateVar, ...]], ...] = ()  # (("R1", (...)), ("R2", (...)))

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"Duplicate rate variables in {self.vars}")
        declared = set(self.vars)
        for row in self.rows:
            for v in row.names:
                if v not in declared:
                    raise ValueError(f"Row '{row}' references undeclared variable {v}")
            if not _is_exact(row.rhs) and not math.isfinite(row.rhs):
                raise ValueError(f"Row '{row}' has a non-finite right-hand side")
        seen = set()
        for name, members in self.objective_groups:
            for v in members:
                if v not in declared:
                    raise ValueError(f"Group {name} references undeclared variable {v}")
                if v in seen:
                    raise ValueError(f"Variable {v} belongs to more than one rate group")
                seen.add(v)

    @classmethod
    def build(
        cls,
        vars: Sequence[RateVar],
        rows: Iterable[Union[Row, Tuple]],
        groups: Optional[Mapping[str, Sequence[RateVar]]] = None,
        clip_negative: bool = False,
    ) -> "ConstraintSystem":
        """
        Assemble a system from (coefs, rhs[, label]) tuples. With clip_negative,
        right-hand sides below zero are replaced by zero.
        """
        built = []
        for row in rows:
            if not isinstance(row, Row):
                row = Row.make(*row)
            if clip_negative and row.rhs < 0:
                row = Row(row.coefs, Fraction(0) if _is_exact(row.rhs) else 0.0, row.label)
            built.append(row)
        groups = groups or {}
        return cls(tuple(vars), tuple(built), tuple((k, tuple(v)) for k, v in groups.items()))

    @property
    def exact(self) -> bool:
        return all(_is_exact(r.rhs) and all(_is_exact(c) for _, c in r.coefs) for r in self.rows)

    @property
    def groups(self) -> Dict[str, Tuple[RateVar, ...]]:
        return dict(self.objective_groups)

    @property
    def objective_vars(self) -> Tuple[RateVar, ...]:
        if not self.objective_groups:
            return self.vars
        return tuple(v for _, members in self.objective_groups for v in members)

    def with_rows(self, rows: Iterable[Row], vars: Sequence[RateVar] = None) -> "ConstraintSystem":
        return ConstraintSystem(tuple(vars) if vars is not None else self.vars, tuple(rows), self.objective_groups)

    def to_dict(self) -> dict:
        def num(x):
            return str(x) if _is_exact(x) else float(x)

        return {
            "vars": list(self.vars),
            "rows": [
                {"coefs": {v: num(c) for v, c in r.coefs}, "rhs": num(r.rhs), "label": r.label}
                for r in self.rows
            ],
            "objective_groups": {k: list(v) for k, v in self.objective_groups},
        }

    @classmethod
    def from_dict(cls, document: dict) -> "ConstraintSystem":
        def num(x):
            return Fraction(x) if isinstance(x, str) else x

        rows = [
            Row.make({v: num(c) for v, c in r["coefs"].items()}, num(r["rhs"]), r.get("label", ""))
            for r in document["rows"]
        ]
        return cls.build(document["vars"], rows, document.get("objective_groups"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def __str__(self):
        return "\n".join(str(r) for r in self.rows)


@dataclass(frozen=True)
class LpResult:
    optimum: Optional[Number]
    witness: Dict[RateVar, Number]
    status: str  # LP_OPTIMAL, LP_INFEASIBLE or LP_UNBOUNDED

    @property
    def value(self) -> Number:
        if self.status != LP_OPTIMAL:
            raise RuntimeError(f"Rate system is {self.status}, there is no optimum")
        return self.optimum


def _dedupe(rows: Iterable[Row]) -> List[Row]:
    # same left-hand side: keep the tightest right-hand side
    best: Dict[Tuple, Row] = {}
    for r in rows:
        prev = best.get(r.coefs)
        if prev is None or r.rhs < prev.rhs:
            best[r.coefs] = r
    return list(best.values())


def rename(sys: ConstraintSystem, mapping: Mapping[RateVar, RateVar]) -> ConstraintSystem:
    vars = tuple(mapping.get(v, v) for v in sys.vars)
    rows = tuple(r.renamed(mapping) for r in sys.rows)
    groups = tuple((k, tuple(mapping.get(v, v) for v in members)) for k, members in sys.objective_groups)
    return ConstraintSystem(vars, rows, groups)


def _complete_involution(swap: Mapping[RateVar, RateVar]) -> Dict[RateVar, RateVar]:
    full = dict(swap)
    for k, v in swap.items():
        full.setdefault(v, k)
    for k, v in full.items():
        if full.get(v, v) != k:
            raise ValueError(f"Swap is not an involution: {k} -> {v} -> {full.get(v, v)}")
    return full


def symmetric_closure(
    sys: ConstraintSystem, swap: Mapping[RateVar, RateVar], mirror: Optional[ConstraintSystem] = None
) -> ConstraintSystem:
    """
    Add the rows obtained by exchanging subscripts through ``swap``.

    Parameters
    ----------
    sys: ConstraintSystem
        The rows written for one user.

    swap: Mapping
        Variable exchange; must be an involution (missing reverse entries are implied).

    mirror: ConstraintSystem
        Rows to rename through ``swap``; defaults to ``sys`` itself. Channel-dependent
        right-hand sides pass the same rows evaluated on the relabeled channel here.
    """
    full = _complete_involution(swap)
    mirror = sys if mirror is None else mirror
    vars = list(sys.vars)
    for v in list(sys.vars) + list(mirror.vars):
        w = full.get(v, v)
        if w not in vars:
            vars.append(w)
    rows = []
    seen = set()
    for r in list(sys.rows) + [r.renamed(full) for r in mirror.rows]:
        key = (r.coefs, r.rhs)
        if key not in seen:
            seen.add(key)
            rows.append(r)
    return ConstraintSystem(tuple(vars), tuple(rows), sys.objective_groups)


def check_feasible(sys: ConstraintSystem, point: Mapping[RateVar, Number], tol: float = FLOAT_TOL) -> bool:
    exact = sys.exact and all(_is_exact(x) for x in point.values())
    slack = 0 if exact else tol
    if any(point.get(v, 0) < -slack for v in sys.vars):
        return False
    return all(r.lhs(point) <= r.rhs + slack for r in sys.rows)


class _Tableau:
    """Dense two-phase tableau simplex over Fractions with Bland's rule (no cycling)."""

    def __init__(self, c: Sequence[Number], A: Sequence[Sequence[Number]], b: Sequence[Number]):
        self.eps = 0
        conv = Fraction
        m, n = len(A), len(c)
        self.n = n
        self.T: List[List[Number]] = []
        self.basis: List[int] = []
        needs_art = [conv(b[i]) < 0 for i in range(m)]
        n_art = sum(needs_art)
        self.width = n + m + n_art
        self.art_start = n + m
        k = 0
        for i in range(m):
            row = [conv(a) for a in A[i]] + [conv(1 if j == i else 0) for j in range(m)] + [conv(0)] * n_art
            rhs = conv(b[i])
            if needs_art[i]:
                row = [-a for a in row]
                rhs = -rhs
                row[self.art_start + k] = conv(1)
                self.basis.append(self.art_start + k)
                k += 1
            else:
                self.basis.append(n + i)
            self.T.append(row + [rhs])
        self.c = [conv(x) for x in c] + [conv(0)] * (m + n_art)
        self.zero = conv(0)

    def _reduced_costs(self, cost: Sequence[Number], allowed: int) -> List[Number]:
        red = list(cost[:allowed])
        for i, bi in enumerate(self.basis):
            cb = cost[bi]
            if cb:
                row = self.T[i]
                for j in range(allowed):
                    red[j] -= cb * row[j]
        return red

    def _pivot(self, r: int, col: int):
        T = self.T
        piv = T[r][col]
        T[r] = [a / piv for a in T[r]]
        for i in range(len(T)):
            if i != r and T[i][col] != 0:
                f = T[i][col]
                T[i] = [a - f * b for a, b in zip(T[i], T[r])]
        self.basis[r] = col

    def _run(self, cost: Sequence[Number], allowed: int) -> str:
        while True:
            red = self._reduced_costs(cost, allowed)
            col = next((j for j in range(allowed) if red[j] > self.eps), None)
            if col is None:
                return LP_OPTIMAL
            best = None
            for i, row in enumerate(self.T):
                if row[col] > self.eps:
                    ratio = row[-1] / row[col]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return LP_UNBOUNDED
            self._pivot(best[1], col)

    def solve(self) -> Tuple[str, Optional[List[Number]]]:
        if self.width > self.art_start:
            cost1 = [self.zero] * self.art_start + [self.zero - 1] * (self.width - self.art_start)
            self._run(cost1, self.width)
            phase1 = sum(cost1[bi] * self.T[i][-1] for i, bi in enumerate(self.basis))
            if phase1 < -self.eps:
                return LP_INFEASIBLE, None
            # drive zero-level artificials out of the basis, dropping redundant rows
            for i in reversed(range(len(self.T))):
                if self.basis[i] >= self.art_start:
                    col = next((j for j in range(self.art_start) if abs(self.T[i][j]) > self.eps), None)
                    if col is None:
                        del self.T[i]
                        del self.basis[i]
                    else:
                        self._pivot(i, col)
        status = self._run(self.c, self.art_start)
        if status != LP_OPTIMAL:
            return status, None
        x = [self.zero] * self.n
        for i, bi in enumerate(self.basis):
            if bi < self.n:
                x[bi] = self.T[i][-1]
        return LP_OPTIMAL, x


def _matrix(sys: ConstraintSystem, order: Sequence[RateVar]):
    index = {v: j for j, v in enumerate(order)}
    A = []
    for r in sys.rows:
        row = [0] * len(order)
        for v, c in r.coefs:
            row[index[v]] = c
        A.append(row)
    return A, [r.rhs for r in sys.rows]


def maximize(sys: ConstraintSystem, objective: Mapping[RateVar, Number], exact: Optional[bool] = None) -> LpResult:
    """Maximize a linear objective over the system (all variables non-negative)."""
    exact = sys.exact if exact is None else exact
    order = list(sys.vars)
    c = [objective.get(v, 0) for v in order]
    A, b = _matrix(sys, order)
    if not A:
        if any(x > 0 for x in c):
            return LpResult(None, {}, LP_UNBOUNDED)
        return LpResult(Fraction(0) if exact else 0.0, {v: 0 for v in order}, LP_OPTIMAL)
    if exact:
        status, x = _Tableau(c, A, b).solve()
    else:
        res = linprog(
            -np.asarray(c, dtype=float),
            A_ub=np.asarray(A, dtype=float),
            b_ub=np.asarray(b, dtype=float),
            bounds=[(0, None)] * len(order),
            method="highs",
        )
        if res.status == 2:
            status, x = LP_INFEASIBLE, None
        elif res.status == 3:
            status, x = LP_UNBOUNDED, None
        elif res.status != 0:
            raise RuntimeError(f"LP solver failed: {res.message}")
        else:
            status, x = LP_OPTIMAL, [max(float(v), 0.0) for v in res.x]
    if status != LP_OPTIMAL:
        return LpResult(None, {}, status)
    witness = dict(zip(order, x))
    optimum = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0) if exact else 0.0)
    return LpResult(optimum, witness, LP_OPTIMAL)


def max_sum_rate(sys: ConstraintSystem) -> LpResult:
    return maximize(sys, {v: 1 for v in sys.objective_vars})


def _normalized(coefs: Dict[RateVar, Number], rhs: Number, label: str) -> Optional[Row]:
    coefs = {v: c for v, c in coefs.items() if c != 0}
    if not coefs:
        return None
    scale = max(abs(c) for c in coefs.values())
    return Row.make({v: c / scale for v, c in coefs.items()}, rhs / scale, label)


def _prune_redundant(rows: List[Row], vars: Sequence[RateVar], exact: bool) -> List[Row]:
    kept = list(rows)
    i = 0
    while i < len(kept):
        row = kept[i]
        others = kept[:i] + kept[i + 1:]
        res = maximize(ConstraintSystem(tuple(vars), tuple(others)), dict(row.coefs), exact=exact)
        slack = 0 if exact else FLOAT_TOL
        if res.status == LP_OPTIMAL and res.optimum <= row.rhs + slack:
            kept = others
        else:
            i += 1
    return kept


def fourier_motzkin_eliminate(sys: ConstraintSystem, var: RateVar, prune: bool = True) -> ConstraintSystem:
    """
    Project the feasible set onto the remaining variables, pairing every upper
    bound on ``var`` with every lower bound, including the implicit ``var >= 0``.
    An empty left-hand side with a negative right-hand side is kept as an
    infeasibility certificate ``0 <= rhs``.
    """
    if var not in sys.vars:
        raise ValueError(f"Variable {var} not present in system {sys.vars}")
    uppers, lowers, rest = [], [], []
    for r in sys.rows:
        c = r.coef(var)
        (uppers if c > 0 else lowers if c < 0 else rest).append(r)
    lowers = lowers + [Row.make({var: -1}, 0, f"{var}>=0")]

    new_rows: List[Row] = list(rest)
    certificates: List[Row] = []
    for up in uppers:
        a = up.coef(var)
        for lo in lowers:
            c = -lo.coef(var)
            coefs: Dict[RateVar, Number] = {}
            for v, k in up.coefs:
                if v != var:
                    coefs[v] = coefs.get(v, 0) + c * k
            for v, k in lo.coefs:
                if v != var:
                    coefs[v] = coefs.get(v, 0) + a * k
            rhs = c * up.rhs + a * lo.rhs
            row = _normalized(coefs, rhs, f"({up.label})+({lo.label})")
            if row is not None:
                new_rows.append(row)
            elif rhs < 0:
                certificates.append(Row.make({}, rhs, "infeasible"))
    vars = tuple(v for v in sys.vars if v != var)
    if certificates:
        return ConstraintSystem(vars, (min(certificates, key=lambda r: r.rhs),))
    new_rows = _dedupe(new_rows)
    # rows without positive coefficients are implied by x >= 0 once rhs >= 0
    new_rows = [r for r in new_rows if any(c > 0 for _, c in r.coefs) or r.rhs < 0]
    if prune:
        new_rows = _prune_redundant(new_rows, vars, sys.exact)
    groups = tuple((k, tuple(v for v in members if v != var)) for k, members in sys.objective_groups)
    return ConstraintSystem(vars, tuple(new_rows), groups)


SUM_VAR = "t"


def max_sum_rate_by_elimination(sys: ConstraintSystem, prune: bool = True) -> Optional[Number]:
    """
    Sum-rate by projection: introduce ``t <= sum of rates`` and eliminate every
    rate. Returns None when the system is infeasible or unbounded.
    """
    name = SUM_VAR
    while name in sys.vars:
        name = "_" + name
    objective = {v: -1 for v in sys.objective_vars}
    objective[name] = 1
    proj = ConstraintSystem(sys.vars + (name,), sys.rows + (Row.make(objective, 0, "sum"),))
    for v in sys.vars:
        proj = fourier_motzkin_eliminate(proj, v, prune=prune)
    if any(not r.coefs and r.rhs < 0 for r in proj.rows):
        return None
    bounds = [r.rhs / r.coef(name) for r in proj.rows if r.coef(name) > 0]
    if not bounds:
        return None
    return min(bounds)


def _upper_bounds(sys: ConstraintSystem) -> Dict[RateVar, Number]:
    ub = {}
    for v in sys.vars:
        cands = [
            r.rhs / r.coef(v)
            for r in sys.rows
            if r.coef(v) > 0 and all(c >= 0 for _, c in r.coefs)
        ]
        if not cands:
            raise ValueError(f"Variable {v} is not bounded by any non-negative row")
        ub[v] = min(cands)
    return ub


def max_sum_rate_bruteforce(sys: ConstraintSystem, grid_step: Number = 1) -> Number:
    """Best sum-rate over the lattice grid_step * Z^n of feasible points (independent oracle)."""
    if len(sys.vars) > BRUTEFORCE_MAX_VARS:
        raise ValueError(f"Brute force supports at most {BRUTEFORCE_MAX_VARS} variables, got {len(sys.vars)}")
    step = Fraction(grid_step)
    if step <= 0:
        raise ValueError(f"Grid step must be positive, got {grid_step}")
    ub = _upper_bounds(sys)
    order = list(sys.vars)
    objective = set(sys.objective_vars)
    monotone = [r for r in sys.rows if all(c >= 0 for _, c in r.coefs)]
    tol = 0 if sys.exact else FLOAT_TOL
    best = [None]

    def dfs(i: int, point: Dict[RateVar, Number], value: Number):
        if i == len(order):
            if all(r.lhs(point) <= r.rhs + tol for r in sys.rows):
                if best[0] is None or value > best[0]:
                    best[0] = value
            return
        v = order[i]
        k = 0
        while k * step <= ub[v] + tol:
            point[v] = k * step
            if all(r.lhs(point) <= r.rhs + tol for r in monotone):
                dfs(i + 1, point, value + (point[v] if v in objective else 0))
            else:
                break  # larger values of v only add to every monotone row
            k += 1
        point.pop(v, None)

    dfs(0, {}, Fraction(0))
    if best[0] is None:
        raise ValueError("No feasible lattice point")
    return best[0]
