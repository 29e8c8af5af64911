import pytest

from coopic.ld_capacity import ld_sum_capacity
from coopic.ld_schemes import CausalityError, EncoderView, make_stream, run_example, run_example1, run_example2, run_example3, EXAMPLES


@pytest.mark.parametrize("runner,p", [(run_example1, 2), (run_example2, 2), (run_example3, 3), (run_example1, 3), (run_example2, 5)])
def test_schemes_decode_without_errors(runner, p):
    trace = runner(8, 1, p)
    assert trace.error_count == 0
    assert len(trace.y3) == 8


@pytest.mark.parametrize("number", [1, 2, 3])
def test_sum_rate_approaches_capacity(number):
    T = 64
    for seed in range(5):
        trace = run_example(number, T, seed, audit=True)
        capacity = ld_sum_capacity(trace.params)
        assert trace.sum_rate >= capacity * (1 - 4 / T)
        assert trace.sum_rate <= capacity


def test_own_symbol_counts():
    T = 8
    assert sum(run_example1(T, 0).own_symbols.values()) == 2 * (3 * T - 2)
    assert sum(run_example2(T, 0).own_symbols.values()) == 7 * (T - 1)
    assert sum(run_example3(T, 0).own_symbols.values()) == 2 * (3 * T - 2)


def test_example3_needs_odd_characteristic():
    with pytest.raises(ValueError):
        run_example3(8, 1, 2)


def test_zero_messages_give_zero_traces():
    trace = run_example(1, 6, 0, zero=True)
    assert all(y.is_zero() for y in trace.y3 + trace.y4 + trace.x1 + trace.x2)


def test_audit_counts_accesses():
    trace = run_example(2, 8, 3, audit=True)
    assert trace.audit["accesses"] > 0
    assert trace.audit["late_reads"] == 0
    assert trace.audit["partner_mismatches"] == 0


def test_encoder_view_rejects_future_and_foreign_reads():
    scheme = EXAMPLES[1](3)
    stream = make_stream(scheme, 4, 0)
    view = EncoderView(1, 2, stream, [])
    with pytest.raises(CausalityError):
        view.y(2)
    with pytest.raises(CausalityError):
        view.own("v2", 1)


@pytest.mark.parametrize("kwargs", [dict(number=4, T=8, seed=0), dict(number=1, T=1, seed=0), dict(number=1, T=8, seed=0, p=4)])
def test_run_example_validation(kwargs):
    with pytest.raises(ValueError):
        run_example(**kwargs)


def test_trace_dict():
    document = run_example(1, 4, 0).to_dict()
    assert document["params"]["n13"] == 4
    assert len(document["slots"]) == 4
    assert document["error_count"] == 0
