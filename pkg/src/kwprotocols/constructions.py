"""Two baseline protocol families, one per extreme of the degree range.

Both solve an arbitrary monotone-compatible partial function directly;
they double as fixtures for the simulation pipeline, since the first is
the smallest inequality protocol and the second exercises conjunction
labels of maximal arity at degree 2.
"""

from __future__ import annotations

from .core import (
    Conjunction,
    Inequality,
    InputError,
    PartialMonotoneFunction,
    Protocol,
    ValueTable,
    Vertex,
    check_monotone,
)


def _require_compatible(f: PartialMonotoneFunction):
    bad = check_monotone(f)
    if bad is not None:
        x, y = bad
        raise InputError(f"function is not monotone-compatible: x={x}, y={y}")


def wide_inequality_protocol(f: PartialMonotoneFunction) -> Protocol:
    """Degree-n protocol of size n + 1: one always-feasible source over
    all n sinks.

    The source label 0 < 1 holds for every pair, and some sink is
    feasible whenever the pair has a solution coordinate, which
    monotone compatibility guarantees.
    """
    _require_compatible(f)
    n = f.n
    q = ValueTable("x", {x: 0 for x in f.zeros})
    r = ValueTable("y", {y: 1 for y in f.ones})
    vertices = [Vertex(label=Inequality(q, r))]
    vertices += [Vertex(index=i) for i in range(1, n + 1)]
    children = [tuple(range(1, n + 1))] + [()] * n
    return Protocol(n, n, tuple(vertices), tuple(children))


def chain_conjunction_protocol(f: PartialMonotoneFunction) -> Protocol:
    """Degree-2 protocol of size 2n - 1 labelled with conjunctions of
    exactly n - 2 inequalities.

    Vertex t (t = 1..n-1) asserts that no coordinate below t solves the
    pair: one conjunct -x_i < 1 - y_i per i < t, padded with always-true
    conjuncts 0 < 1 up to arity n - 2.  Its children are sink t and the
    next chain vertex (or sink n at the end), so the walk descends to
    the least solution coordinate.  Requires n >= 3 for the arity to be
    positive.
    """
    _require_compatible(f)
    n = f.n
    if n < 3:
        raise InputError(f"the chain construction needs n >= 3, got n={n}")
    arity = n - 2

    def conjunct(i):
        # -x_i < 1 - y_i holds exactly when coordinate i does not solve.
        q = ValueTable("x", {x: -x.bit(i) for x in f.zeros})
        r = ValueTable("y", {y: 1 - y.bit(i) for y in f.ones})
        return q, r

    padding = (ValueTable("x", {x: 0 for x in f.zeros}),
               ValueTable("y", {y: 1 for y in f.ones}))

    vertices: list[Vertex] = []
    for t in range(1, n):
        pairs = [conjunct(i) for i in range(1, t)]
        pairs += [padding] * (arity - len(pairs))
        vertices.append(Vertex(label=Conjunction(tuple(pairs))))
    sink_id = {i: n - 1 + (i - 1) for i in range(1, n + 1)}
    vertices += [Vertex(index=i) for i in range(1, n + 1)]

    children: list[tuple[int, ...]] = []
    for t in range(1, n - 1):
        children.append((sink_id[t], t))
    children.append((sink_id[n - 1], sink_id[n]))
    children += [()] * n
    return Protocol(n, 2, tuple(vertices), tuple(children))
