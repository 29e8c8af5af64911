from fractions import Fraction

import numpy as np
import pytest

from coopic.rate_region import (
    LP_INFEASIBLE,
    ConstraintSystem,
    check_feasible,
    fourier_motzkin_eliminate,
    max_sum_rate,
    max_sum_rate_bruteforce,
    max_sum_rate_by_elimination,
    maximize,
    rename,
    symmetric_closure,
)


def test_exact_lp_keeps_fractions():
    sys = ConstraintSystem.build(("x", "y"), [({"x": 2, "y": 1}, 1), ({"x": 1, "y": 2}, 1)])
    res = max_sum_rate(sys)
    assert res.optimum == Fraction(2, 3)
    assert check_feasible(sys, res.witness)


def test_float_lp():
    sys = ConstraintSystem.build(("x", "y"), [({"x": 2, "y": 1}, 1.0), ({"x": 1, "y": 2}, 1.0)])
    assert max_sum_rate(sys).optimum == pytest.approx(2 / 3)


def test_infeasible_system():
    sys = ConstraintSystem.build(("x",), [({"x": 1}, -1)])
    res = maximize(sys, {"x": 1})
    assert res.status == LP_INFEASIBLE
    with pytest.raises(RuntimeError):
        res.value


def test_clip_negative():
    sys = ConstraintSystem.build(("x",), [({"x": 1}, -3)], clip_negative=True)
    assert max_sum_rate(sys).optimum == 0


def test_undeclared_variable():
    with pytest.raises(ValueError):
        ConstraintSystem.build(("x",), [({"y": 1}, 1)])


def test_fourier_motzkin_projection():
    sys = ConstraintSystem.build(("x", "y"), [({"x": 1, "y": 1}, 2), ({"x": 1}, 1)])
    proj = fourier_motzkin_eliminate(sys, "y")
    assert proj.vars == ("x",)
    assert maximize(proj, {"x": 1}).optimum == 1


def test_bruteforce_oracle():
    sys = ConstraintSystem.build(("r1", "r2"), [({"r1": 1, "r2": 1}, 1)])
    assert max_sum_rate_bruteforce(sys) == 1
    assert max_sum_rate(sys).optimum == 1
    assert max_sum_rate_by_elimination(sys) == 1


def test_elimination_matches_lp_on_random_systems():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        vars = tuple(f"r{i}" for i in range(n))
        rows = [({v: 1}, int(rng.integers(0, 6))) for v in vars]
        for _ in range(int(rng.integers(1, 5))):
            coefs = {v: int(c) for v, c in zip(vars, rng.integers(0, 3, size=n))}
            rows.append((coefs, int(rng.integers(0, 8))))
        sys = ConstraintSystem.build(vars, rows)
        assert max_sum_rate_by_elimination(sys) == max_sum_rate(sys).optimum
        assert max_sum_rate_bruteforce(sys, Fraction(1, 2)) <= max_sum_rate(sys).optimum


def test_symmetric_closure_and_rename():
    sys = ConstraintSystem.build(("a1", "b1"), [({"a1": 1, "b1": 1}, 3)])
    closed = symmetric_closure(sys, {"a1": "a2", "b1": "b2"})
    assert set(closed.vars) == {"a1", "b1", "a2", "b2"}
    assert len(closed.rows) == 2
    renamed = rename(closed, {"a1": "x"})
    assert "x" in renamed.vars and "a1" not in renamed.vars


def test_symmetric_closure_rejects_non_involution():
    sys = ConstraintSystem.build(("a", "b", "c"), [({"a": 1}, 1)])
    with pytest.raises(ValueError):
        symmetric_closure(sys, {"a": "b", "b": "c"})


def test_dict_round_trip_keeps_exact_values():
    sys = ConstraintSystem.build(("x", "y"), [({"x": 1, "y": 1}, Fraction(5, 2), "sum")], {"R1": ("x",), "R2": ("y",)})
    again = ConstraintSystem.from_dict(sys.to_dict())
    assert again.rows == sys.rows
    assert again.groups == sys.groups
