"""Exhaustive verification, tracing, and feasible sets."""

import random

import pytest

from kwprotocols.core import (
    BitString,
    Inequality,
    InputError,
    PartialMonotoneFunction,
    Protocol,
    ValueTable,
    Vertex,
)
from kwprotocols.constructions import (
    chain_conjunction_protocol,
    wide_inequality_protocol,
)
from kwprotocols.verifier import StuckError, feasible_set, trace, verify_solves

from testutil import random_function


def _threshold(n: int, k: int) -> PartialMonotoneFunction:
    """Total threshold-k function as a partial function on all of {0,1}^n."""
    zeros, ones = [], []
    for v in range(1 << n):
        bits = tuple((v >> (n - 1 - i)) & 1 for i in range(n))
        (ones if sum(bits) >= k else zeros).append(BitString(bits))
    return PartialMonotoneFunction(n, frozenset(zeros), frozenset(ones))


class TestVerifySolves:
    def test_wide_protocol_solves(self):
        f = _threshold(4, 2)
        report = verify_solves(wide_inequality_protocol(f), f)
        assert report.ok
        assert report.render() == "ok"

    def test_chain_protocol_solves(self):
        f = _threshold(4, 3)
        report = verify_solves(chain_conjunction_protocol(f), f)
        assert report.ok

    def test_random_functions(self):
        rng = random.Random(11)
        for _ in range(20):
            f = random_function(rng, rng.randrange(3, 6))
            assert verify_solves(wide_inequality_protocol(f), f).ok

    def test_wrong_sink_index_detected(self):
        f = PartialMonotoneFunction.from_strings(3, ["110"], ["111"])
        p = wide_inequality_protocol(f)
        # coordinate 3 is the only solution for the single pair; misdirect it
        broken = Protocol(p.n, p.degree,
                          p.vertices[:3] + (Vertex(index=1),), p.children)
        report = verify_solves(broken, f)
        assert not report.ok
        conditions = {v.condition for v in report.violations}
        assert conditions == {"no-feasible-child"}
        assert report.violations[0].vertex == 0
        assert "no-feasible-child" in report.render()

    def test_infeasible_source_detected(self):
        f = PartialMonotoneFunction.from_strings(2, ["00"], ["11"])
        never = Inequality(ValueTable("x", {BitString.parse("00"): 1}),
                           ValueTable("y", {BitString.parse("11"): 0}))
        p = Protocol(2, 1, (Vertex(label=never), Vertex(index=1)), ((1,), ()))
        report = verify_solves(p, f)
        assert {v.condition for v in report.violations} == {"source-infeasible"}

    def test_n_mismatch(self):
        f3 = _threshold(3, 2)
        f4 = _threshold(4, 2)
        p = wide_inequality_protocol(f3)
        with pytest.raises(InputError, match="n=3"):
            verify_solves(p, f4)

    def test_jobs_partition_is_invisible(self):
        f = _threshold(4, 2)
        p = wide_inequality_protocol(f)
        broken = Protocol(p.n, p.degree, p.vertices[:1] + tuple(
            Vertex(index=1) for _ in range(4)), p.children)
        lone = verify_solves(broken, f)
        for jobs in (2, 3, 8):
            assert verify_solves(broken, f, jobs=jobs) == lone

    def test_strict_sinks_passes_definitionally(self):
        f = _threshold(3, 2)
        report = verify_solves(wide_inequality_protocol(f), f, strict_sinks=True)
        assert report.ok

    def test_strict_sinks_size_guard(self):
        f = PartialMonotoneFunction.from_strings(13, ["0" * 13], ["1" * 13])
        p = wide_inequality_protocol(f)
        with pytest.raises(InputError, match="n <= 12"):
            verify_solves(p, f, strict_sinks=True)


class TestTrace:
    def test_first_feasible_child_wins(self):
        f = _threshold(3, 2)
        p = wide_inequality_protocol(f)
        assert trace(p, BitString.parse("010"), BitString.parse("011")) == 3
        assert trace(p, BitString.parse("010"), BitString.parse("110")) == 1
        assert trace(p, BitString.parse("001"), BitString.parse("011")) == 2

    def test_trace_agrees_with_solution(self):
        rng = random.Random(5)
        for _ in range(10):
            f = random_function(rng, 4)
            p = chain_conjunction_protocol(f)
            for x, y in f.pairs():
                i = trace(p, x, y)
                assert x.bit(i) == 0 and y.bit(i) == 1

    def test_infeasible_source_raises(self):
        never = Inequality(ValueTable("x", {BitString.parse("00"): 1}),
                           ValueTable("y", {BitString.parse("11"): 0}))
        p = Protocol(2, 1, (Vertex(label=never), Vertex(index=1)), ((1,), ()))
        with pytest.raises(InputError, match="source is not feasible"):
            trace(p, BitString.parse("00"), BitString.parse("11"))

    def test_stuck_raises(self):
        always = Inequality(ValueTable("x", {BitString.parse("1"): 0}),
                            ValueTable("y", {BitString.parse("1"): 1}))
        p = Protocol(1, 1, (Vertex(label=always), Vertex(index=1)), ((1,), ()))
        with pytest.raises(StuckError) as exc:
            trace(p, BitString.parse("1"), BitString.parse("1"))
        assert exc.value.vertex == 0


class TestFeasibleSet:
    def test_sink_feasible_set(self):
        f = _threshold(3, 2)
        p = wide_inequality_protocol(f)
        for i in (1, 2, 3):
            expected = {(x, y) for x, y in f.pairs()
                        if x.bit(i) == 0 and y.bit(i) == 1}
            assert feasible_set(p, i, f) == expected

    def test_source_feasible_everywhere(self):
        f = _threshold(3, 1)
        p = wide_inequality_protocol(f)
        assert feasible_set(p, 0, f) == set(f.pairs())

    def test_out_of_range(self):
        f = _threshold(2, 1)
        p = wide_inequality_protocol(f)
        with pytest.raises(InputError, match="out of range"):
            feasible_set(p, p.size, f)
