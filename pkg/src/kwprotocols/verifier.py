"""Exhaustive verification of protocols against a partial monotone function.

A protocol solves the game for f when, for every pair (x, y) with
f(x) = 0 and f(y) = 1, the source is feasible and every feasible inner
vertex has a feasible child.  Those two conditions force every feasible
walk from the source to end in a feasible sink, whose index is then a
solution coordinate.  Verification enumerates all pairs, so it is exact
at desk scale.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from .core import (
    BitString,
    InputError,
    KwError,
    PartialMonotoneFunction,
    Protocol,
    Report,
    Violation,
    eval_vertex,
)


class StuckError(KwError):
    """A feasible inner vertex without a feasible child was reached."""

    def __init__(self, vertex: int):
        super().__init__(f"stuck at vertex {vertex}: no feasible child")
        self.vertex = vertex


def _check_pairs(p: Protocol, source: int, pairs) -> list[Violation]:
    found = []
    for x, y in pairs:
        feasible = [eval_vertex(p, v, x, y) for v in range(p.size)]
        if not feasible[source]:
            found.append(Violation("source-infeasible", vertex=source, x=x, y=y))
        for vid in range(p.size):
            kids = p.children[vid]
            if kids and feasible[vid] and not any(feasible[k] for k in kids):
                found.append(Violation("no-feasible-child", vertex=vid, x=x, y=y))
    return found


def verify_solves(p: Protocol, f: PartialMonotoneFunction, *,
                  strict_sinks: bool = False, jobs: int = 1) -> Report:
    """Check both solving conditions on every pair of f.

    Sink correctness holds by construction (sinks are stored as bare
    indices, evaluated definitionally), so it is not enumerated.  With
    ``strict_sinks`` the definitional sink relation is re-checked over
    the full cube anyway, which only makes sense for small n.

    The pair enumeration may be partitioned across ``jobs`` workers; the
    merged report is deterministic regardless of the partition.
    """
    if p.n != f.n:
        raise InputError(f"protocol has n={p.n} but function has n={f.n}")
    source = p.source()
    pairs = list(f.pairs())
    if jobs > 1 and len(pairs) > 1:
        chunks = [pairs[i::jobs] for i in range(jobs)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(lambda c: _check_pairs(p, source, c), chunks)
        found = [v for part in parts for v in part]
    else:
        found = _check_pairs(p, source, pairs)
    if strict_sinks:
        if p.n > 12:
            raise InputError("strict sink re-check is limited to n <= 12")
        from itertools import product
        cube = [BitString(bits) for bits in product((0, 1), repeat=p.n)]
        for vid in p.sink_ids():
            index = p.vertices[vid].index
            for x in cube:
                for y in cube:
                    definitional = x.bit(index) == 0 and y.bit(index) == 1
                    if eval_vertex(p, vid, x, y) != definitional:
                        found.append(Violation("sink-relation", vertex=vid, x=x, y=y))
    found.sort(key=lambda v: (v.vertex if v.vertex is not None else -1,
                              v.x.bits if v.x is not None else (),
                              v.y.bits if v.y is not None else (),
                              v.condition))
    return Report(tuple(found))


def trace(p: Protocol, x: BitString, y: BitString) -> int:
    """Walk from the source, taking the first feasible child, until a sink.

    Returns the sink's index.  Raises InputError when the source is not
    feasible for (x, y) and StuckError when a feasible inner vertex has
    no feasible child.
    """
    vid = p.source()
    if not eval_vertex(p, vid, x, y):
        raise InputError(f"source is not feasible for x={x}, y={y}")
    while True:
        vert = p.vertices[vid]
        if vert.is_sink:
            return vert.index
        for k in p.children[vid]:
            if eval_vertex(p, k, x, y):
                vid = k
                break
        else:
            raise StuckError(vid)


def feasible_set(p: Protocol, vid: int, f: PartialMonotoneFunction
                 ) -> set[tuple[BitString, BitString]]:
    """All pairs of f for which the given vertex is feasible."""
    if not 0 <= vid < p.size:
        raise InputError(f"vertex id {vid} out of range")
    return {(x, y) for x, y in f.pairs() if eval_vertex(p, vid, x, y)}
