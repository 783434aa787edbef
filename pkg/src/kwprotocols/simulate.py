"""Simulation of conjunction-labelled protocols by degree-2 equality
protocols.

The pipeline rests on one bit-level fact: after rank normalization all
table values are w-bit numbers, and a < b holds for w-bit a, b exactly
when, at a unique position i, the prefixes agree, a has 0 and b has 1.
A conjunction vertex v is therefore feasible exactly when every one of
its inequalities has such a witness position; the tuple I of witness
positions is unique, and "v is feasible with witness I" is a
conjunction of bitwise equalities between x-side and y-side bits.

The simulation builds one output vertex v(I) per inner vertex v and
witness tuple I (the skeleton), one sink per original sink, and wires
them with binary search trees: the tree below v(I) locates, among v's
children, a feasible candidate together with its own witness tuple,
testing one inequality bit per step.  Trees are materialized as actual
trees (shared labels are not merged inside a tree); their sources and
leaf references are identified with skeleton vertices at assembly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

from .core import (
    BitConjunction,
    BitEqualityConjunction,
    BitString,
    BitTerm,
    Conjunction,
    Equality,
    Inequality,
    InputError,
    KwError,
    PartialMonotoneFunction,
    Protocol,
    ValueTable,
    Vertex,
    encode_bit_conjunction,
    rank_normalize,
    sink_equality_conjunction,
)
from .verifier import verify_solves

# Skeleton keys: ("sink", vid) or ("wit", vid, entries).
SkeletonKey = tuple


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class WitnessTuple:
    """One witness position per inequality of a conjunction label."""

    entries: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        return "(" + ",".join(str(e) for e in self.entries) + ")"


def decompose_inequality(a: BitString, b: BitString) -> Optional[int]:
    """The unique witness position for a < b, or None when a >= b.

    Position i witnesses a < b when a and b agree strictly before i,
    a has 0 at i and b has 1 at i.  For equal-width strings such an i
    exists exactly when a < b as numbers, and it is unique.
    """
    if len(a) != len(b):
        raise InputError(f"widths differ: {len(a)} vs {len(b)}")
    if len(a) < 1:
        raise InputError("width must be at least 1")
    for i in range(1, len(a) + 1):
        if a.bit(i) != b.bit(i):
            return i if a.bit(i) == 0 else None
    return None


def _table_value_bits(table: ValueTable, s: BitString, width: int) -> BitString:
    v = table.get(s)
    if not isinstance(v, int) or isinstance(v, bool) or v < 0 or (v >> width):
        raise InputError(
            f"table value {v!r} for {s} is not a {width}-bit integer; "
            "rank normalize first")
    return BitString.from_int(v, width)


def witnesses(label: Conjunction, x: BitString, y: BitString, width: int
              ) -> Optional[WitnessTuple]:
    """The witness tuple certifying that every inequality of the label
    holds on (x, y), or None when some inequality fails."""
    found = []
    for q, r in label.pairs:
        i = decompose_inequality(_table_value_bits(q, x, width),
                                 _table_value_bits(r, y, width))
        if i is None:
            return None
        found.append(i)
    return WitnessTuple(tuple(found))


def _pair_terms(vid: int, label: Conjunction, j: int, bit: int, width: int
                ) -> tuple[BitTerm, BitTerm]:
    q, r = label.pairs[j - 1]
    lhs = BitTerm.table_bit(q, ("q", vid, j), bit, width)
    rhs = BitTerm.table_bit(r, ("r", vid, j), bit, width)
    return lhs, rhs


def witness_label(vid: int, label: Conjunction, witness: WitnessTuple, width: int
                  ) -> BitEqualityConjunction:
    """The bit-level conjunction asserting feasibility with exactly this
    witness tuple: per inequality, prefix equality below the witness
    position, then 0 on the x side and 1 on the y side at it.

    Terms are ordered by (inequality, bit position), the strict-below
    pair contributing its two equalities at the witness position; every
    occurrence of this label is built here, so structurally equal
    witness assertions are also identical term lists.
    """
    if len(witness) != label.arity:
        raise InputError(
            f"witness tuple has {len(witness)} entries for arity {label.arity}")
    pairs = []
    for j in range(1, label.arity + 1):
        pos = witness.entries[j - 1]
        if not 1 <= pos <= width:
            raise InputError(f"witness position {pos} out of range for width {width}")
        for k in range(1, pos):
            pairs.append(_pair_terms(vid, label, j, k, width))
        lhs, rhs = _pair_terms(vid, label, j, pos, width)
        pairs.append((lhs, BitTerm.constant(0)))
        pairs.append((BitTerm.constant(1), rhs))
    return BitEqualityConjunction(tuple(pairs))


# ---------------------------------------------------------------------------
# candidates and skeleton


@dataclass(frozen=True)
class Candidate:
    """A child vertex to be tested by a search tree: a conjunction
    vertex or a sink.  Sinks are treated as pseudo-candidates with one
    single-bit inequality x_i < y_i, which is exactly their
    feasibility."""

    vid: int
    label: Conjunction | None = None
    index: int | None = None

    def __post_init__(self):
        if (self.label is None) == (self.index is None):
            raise InputError("a candidate is either a conjunction vertex or a sink")

    @property
    def is_sink(self) -> bool:
        return self.index is not None

    @property
    def arity(self) -> int:
        return 1 if self.is_sink else self.label.arity


def _candidate(view: Protocol, vid: int) -> Candidate:
    vert = view.vertices[vid]
    if vert.is_sink:
        return Candidate(vid, index=vert.index)
    return Candidate(vid, label=vert.label)


def _witness_tuples(width: int, arity: int):
    for entries in product(range(1, width + 1), repeat=arity):
        yield WitnessTuple(entries)


def _conjunction_view(p: Protocol) -> tuple[Protocol, int]:
    """Reads every inner label as a conjunction (an inequality counts as
    arity 1) and checks the arity is uniform."""
    arity = None
    out = []
    for vid, vert in enumerate(p.vertices):
        if vert.is_sink:
            out.append(vert)
            continue
        lab = vert.label
        if isinstance(lab, Inequality):
            lab = Conjunction(((lab.q, lab.r),))
        if not isinstance(lab, Conjunction):
            raise InputError(
                f"vertex {vid}: expected an inequality or conjunction label")
        if arity is None:
            arity = lab.arity
        elif lab.arity != arity:
            raise InputError(
                f"vertex {vid}: arity {lab.arity} differs from {arity}")
        out.append(Vertex(label=lab))
    return Protocol(p.n, p.degree, tuple(out), p.children), (arity or 1)


def _resolve_width(view: Protocol, width: Optional[int]) -> int:
    needed = 1
    for vid in view.inner_ids():
        for q, r in view.vertices[vid].label.pairs:
            for table in (q, r):
                for s, v in table.entries.items():
                    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                        raise InputError(
                            f"vertex {vid}: value {v!r} for {s} is not a "
                            "nonnegative integer; rank normalize first")
                    needed = max(needed, v.bit_length())
    if width is None:
        return needed
    if width < needed:
        raise InputError(f"width {width} is too small; values need {needed} bits")
    return width


def build_skeleton(p: Protocol, width: int) -> dict[SkeletonKey, BitEqualityConjunction]:
    """The output vertex set before wiring: per sink its canonical
    bit-level relation, per inner vertex v one entry per witness tuple I
    labelled with the witness assertion for (v, I)."""
    view, arity = _conjunction_view(p)
    skeleton: dict[SkeletonKey, BitEqualityConjunction] = {}
    for vid, vert in enumerate(view.vertices):
        if vert.is_sink:
            skeleton[("sink", vid)] = sink_equality_conjunction(vert.index)
        else:
            for wt in _witness_tuples(width, arity):
                skeleton[("wit", vid, wt.entries)] = witness_label(
                    vid, vert.label, wt, width)
    return skeleton


# ---------------------------------------------------------------------------
# search trees


class _Chain:
    """A persistent suffix of condition pairs; keeps tree labels shared
    so that materializing every vertex label is the only quadratic step."""

    __slots__ = ("parent", "added")

    def __init__(self, parent, added):
        self.parent = parent
        self.added = tuple(added)


def _materialize(chain: _Chain) -> tuple:
    parts = []
    while chain is not None:
        parts.append(chain.added)
        chain = chain.parent
    out = []
    for added in reversed(parts):
        out.extend(added)
    return tuple(out)


@dataclass
class TreeNode:
    """A vertex of a search tree: internal vertices carry a condition
    chain, leaves carry a skeleton reference."""

    chain: _Chain | None
    ref: SkeletonKey | None
    children: list["TreeNode"]

    @property
    def is_leaf(self) -> bool:
        return self.ref is not None

    def label(self) -> BitEqualityConjunction | None:
        if self.chain is None:
            return None
        return BitEqualityConjunction(_materialize(self.chain))

    def size(self) -> int:
        count = 0
        stack = [self]
        while stack:
            node = stack.pop()
            count += 1
            stack.extend(node.children)
        return count

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


def _leaf(key: SkeletonKey) -> TreeNode:
    return TreeNode(chain=None, ref=key, children=[])


class TreeBuilder:
    """Builds the candidate search tree for one parent condition.

    ``candidates[0]`` holds position 1, the candidate tested last; the
    search starts at the highest position.  Per candidate, inequalities
    are tested from the last one down and each inequality bit by bit
    from the most significant.  At every step the tested x-side bit is
    compared with the y-side bit: an equality branch continues the
    current inequality, a strict branch either records the witness
    position (x bit 0, y bit 1) or abandons the candidate (x bit 1,
    y bit 0).  Position 1 needs no abandonment branches: when every
    earlier candidate has been ruled out, the remaining one must be
    feasible, so its final bit per inequality is never tested and a
    fully equal prefix forces the witness to sit on the last position.
    """

    def __init__(self, candidates: Sequence[Candidate], width: int):
        if not candidates:
            raise InputError("a search tree needs at least one candidate")
        if width < 1:
            raise InputError(f"width must be at least 1, got {width}")
        self.candidates = list(candidates)
        self.width = width

    def build(self, phi: BitEqualityConjunction) -> TreeNode:
        root_chain = _Chain(None, phi.pairs)
        entry = self._next_candidate(len(self.candidates), root_chain)
        if entry.is_leaf:
            # Degenerate tree: the only candidate resolves immediately
            # (a sink in position 1, or width 1 forcing all witnesses).
            return TreeNode(chain=root_chain, ref=None, children=[entry])
        return entry

    # -- candidate transitions

    def _next_candidate(self, pos: int, chain: _Chain) -> TreeNode:
        cand = self.candidates[pos - 1]
        if pos == 1:
            if cand.is_sink:
                return _leaf(("sink", cand.vid))
            if self.width == 1:
                # Every inequality over 1-bit values is witnessed at
                # position 1, so the candidate's witness tuple is forced.
                entries = (1,) * cand.arity
                return _leaf(("wit", cand.vid, entries))
            return self._stage(pos, cand.arity, self.width, chain, {})
        if cand.is_sink:
            return self._stage(pos, 1, 1, chain, {})
        return self._stage(pos, cand.arity, self.width, chain, {})

    # -- per-stage condition terms

    def _terms(self, cand: Candidate, j: int, bit: int) -> tuple[BitTerm, BitTerm]:
        if cand.is_sink:
            return (BitTerm.input_bit("x", cand.index),
                    BitTerm.input_bit("y", cand.index))
        return _pair_terms(cand.vid, cand.label, j, bit, self.width)

    def _leaf_for(self, cand: Candidate, recorded: dict, last_pos: int) -> TreeNode:
        if cand.is_sink:
            return _leaf(("sink", cand.vid))
        entries = tuple(recorded[j] if j > 1 else last_pos
                        for j in range(1, cand.arity + 1))
        return _leaf(("wit", cand.vid, entries))

    # -- the stage machinery

    def _stage(self, pos: int, j: int, k: int, chain: _Chain, recorded: dict
               ) -> TreeNode:
        cand = self.candidates[pos - 1]
        w = 1 if cand.is_sink else self.width
        bit = w - k + 1
        lhs, rhs = self._terms(cand, j, bit)
        below = ((lhs, BitTerm.constant(0)), (BitTerm.constant(1), rhs))
        above = ((lhs, BitTerm.constant(1)), (BitTerm.constant(0), rhs))
        equal = ((lhs, rhs),)
        unequal = ((lhs, rhs.negate()),)

        if pos == 1:
            # Two-way stages; the final bit of each inequality is skipped.
            eq_chain = _Chain(chain, equal)
            lt_chain = _Chain(chain, below)
            if k > 2:
                on_equal = self._stage(1, j, k - 1, eq_chain, recorded)
            elif j > 1:
                # Fully equal prefix: the witness is forced onto the last
                # position; recorded without appending its strict pair.
                on_equal = self._stage(1, j - 1, w, eq_chain, recorded | {j: w})
            else:
                on_equal = self._leaf_for(cand, recorded, w)
            if j > 1:
                on_below = self._stage(1, j - 1, w, lt_chain, recorded | {j: bit})
            else:
                on_below = self._leaf_for(cand, recorded, bit)
            return TreeNode(chain=chain, ref=None, children=[on_equal, on_below])

        # Higher positions: a three-way split behind an inequality vertex.
        eq_chain = _Chain(chain, equal)
        if k > 1:
            on_equal = self._stage(pos, j, k - 1, eq_chain, recorded)
        else:
            # All bits equal: this inequality fails, abandon the candidate.
            on_equal = self._next_candidate(pos - 1, eq_chain)
        ne_chain = _Chain(chain, unequal)
        lt_chain = _Chain(chain, below)
        gt_chain = _Chain(chain, above)
        if j > 1:
            on_below = self._stage(pos, j - 1, w, lt_chain, recorded | {j: bit})
        else:
            on_below = self._leaf_for(cand, recorded, bit)
        on_above = self._next_candidate(pos - 1, gt_chain)
        split = TreeNode(chain=ne_chain, ref=None, children=[on_below, on_above])
        return TreeNode(chain=chain, ref=None, children=[on_equal, split])


def build_tree(phi: BitEqualityConjunction, candidates: Sequence[Candidate],
               width: int) -> TreeNode:
    """The full search tree for one parent condition; ``candidates[0]``
    is tested last (position 1)."""
    return TreeBuilder(candidates, width).build(phi)


def stage_tree(candidates: Sequence[Candidate], position: int, ineq_index: int,
               bit_step: int, phi: BitEqualityConjunction, width: int,
               recorded: Optional[dict] = None) -> TreeNode:
    """A single stage subtree, entered mid-search; used to pin down the
    exact per-stage sizes.

    ``recorded`` must hold witness positions for every inequality of the
    entered candidate above ``ineq_index``, as the search would have
    recorded them on the way down.
    """
    builder = TreeBuilder(candidates, width)
    if not 1 <= position <= len(candidates):
        raise InputError(f"position {position} out of range")
    cand = builder.candidates[position - 1]
    w = 1 if cand.is_sink else width
    if not 1 <= ineq_index <= cand.arity:
        raise InputError(f"inequality index {ineq_index} out of range")
    if position == 1:
        if cand.is_sink:
            raise InputError("position 1 holds a sink; there is no stage to enter")
        if width < 2:
            raise InputError("position-1 stages need width at least 2")
        if not 2 <= bit_step <= w:
            raise InputError(f"bit step {bit_step} out of range for width {w}")
    elif not 1 <= bit_step <= w:
        raise InputError(f"bit step {bit_step} out of range for width {w}")
    recorded = dict(recorded or {})
    expected = set(range(ineq_index + 1, cand.arity + 1))
    if set(recorded) != expected:
        raise InputError(
            f"recorded witness positions must cover inequalities {sorted(expected)}")
    chain = _Chain(None, phi.pairs)
    return builder._stage(position, ineq_index, bit_step, chain, recorded)


def _positions(view: Protocol, kids: Sequence[int]) -> list[Candidate]:
    """Candidate order for a child list: sinks are tested first, inner
    vertices last, so position 1 holds an inner vertex whenever one
    exists; within each group the child order is kept."""
    sinks = [k for k in kids if view.vertices[k].is_sink]
    inner = [k for k in kids if not view.vertices[k].is_sink]
    test_order = sinks + inner
    return [_candidate(view, k) for k in reversed(test_order)]


# ---------------------------------------------------------------------------
# assembly


def simulate_conj_to_eq(p: Protocol, f: PartialMonotoneFunction, *,
                        width: Optional[int] = None, check: bool = False,
                        encode: bool = True) -> Protocol:
    """Simulate a conjunction protocol by a degree-2 equality protocol.

    Expects normalized tables (nonnegative integers fitting the width;
    the minimal sufficient width is used when none is given).  The
    output has one source, degree at most 2, and equality labels over
    fixed-width bit strings; with ``encode`` off the bit-level
    conjunction labels are kept for inspection.  With ``check`` the
    input is verified against f first and the output afterwards.
    """
    if p.n != f.n:
        raise InputError(f"protocol has n={p.n} but function has n={f.n}")
    if check:
        report = verify_solves(p, f)
        if not report.ok:
            raise InputError("input protocol does not solve f:\n" + report.render())
    view, arity = _conjunction_view(p)
    w = _resolve_width(view, width)
    skeleton = build_skeleton(view, w)

    source = view.source()
    trees: list[tuple[Optional[SkeletonKey], TreeNode]] = []
    trees.append((None, build_tree(BitEqualityConjunction(),
                                   _positions(view, (source,)), w)))
    for vid in view.inner_ids():
        builder = TreeBuilder(_positions(view, view.children[vid]), w)
        for wt in _witness_tuples(w, arity):
            key = ("wit", vid, wt.entries)
            trees.append((key, builder.build(skeleton[key])))

    # Vertex ids: 0 is the new source, then the skeleton in order, then
    # the internal tree vertices in tree order.
    ids: dict[SkeletonKey, int] = {}
    vertices: list[Optional[Vertex]] = [None]
    children: list[tuple[int, ...]] = [()]
    for key, conj in skeleton.items():
        ids[key] = len(vertices)
        if key[0] == "sink":
            vertices.append(Vertex(index=view.vertices[key[1]].index))
        else:
            vertices.append(Vertex(label=BitConjunction(conj)))
        children.append(())

    def place(node: TreeNode, vid: int):
        vertices[vid] = Vertex(label=BitConjunction(
            BitEqualityConjunction(_materialize(node.chain))))
        kid_ids = []
        for kid in node.children:
            if kid.is_leaf:
                kid_ids.append(ids[kid.ref])
            else:
                kid_ids.append(len(vertices))
                vertices.append(None)
                children.append(())
                place(kid, kid_ids[-1])
        children[vid] = tuple(kid_ids)

    for key, tree in trees:
        place(tree, 0 if key is None else ids[key])

    out = Protocol(p.n, 2, tuple(vertices), tuple(children))
    if encode:
        out = encode_protocol_labels(out, f)
    if check:
        report = verify_solves(out, f)
        if not report.ok:
            raise KwError(
                "internal error: simulated output fails verification:\n"
                + report.render())
    return out


def encode_protocol_labels(p: Protocol, f: PartialMonotoneFunction) -> Protocol:
    """Replace every bit-level conjunction label by the equivalent
    equality label over the domains of f."""
    vertices = []
    for vert in p.vertices:
        if not vert.is_sink and isinstance(vert.label, BitConjunction):
            q, r = encode_bit_conjunction(vert.label.conjunction, f.zeros, f.ones)
            vertices.append(Vertex(label=Equality(q, r)))
        else:
            vertices.append(vert)
    return Protocol(p.n, p.degree, tuple(vertices), p.children)


# ---------------------------------------------------------------------------
# equality to conjunctions, degree reduction


def eq_to_conj2(p: Protocol) -> Protocol:
    """Replace each equality label q = r by the equivalent conjunction
    of two inequalities q < r + 1 and -q < -r + 1 over the integers.
    Size, structure, and per-vertex feasible sets are unchanged."""
    vertices = []
    for vid, vert in enumerate(p.vertices):
        if vert.is_sink:
            vertices.append(vert)
            continue
        lab = vert.label
        if not isinstance(lab, Equality):
            raise InputError(f"vertex {vid}: expected an equality label")
        for table in (lab.q, lab.r):
            for v in table.entries.values():
                if not isinstance(v, int) or isinstance(v, bool):
                    raise InputError(
                        f"vertex {vid}: integer tables required, got {v!r}")
        first = (lab.q, lab.r.map_values(lambda v: v + 1))
        second = (lab.q.map_values(lambda v: -v),
                  lab.r.map_values(lambda v: -v + 1))
        vertices.append(Vertex(label=Conjunction((first, second))))
    return Protocol(p.n, p.degree, tuple(vertices), p.children)


def degree_reduce_eq(p: Protocol, f: PartialMonotoneFunction, *,
                     check: bool = False) -> Protocol:
    """Turn an equality protocol of any degree into a degree-2 equality
    protocol: rewrite equalities as conjunctions of two inequalities,
    rank normalize, and simulate."""
    if check:
        report = verify_solves(p, f)
        if not report.ok:
            raise InputError("input protocol does not solve f:\n" + report.render())
    norm, w = rank_normalize(eq_to_conj2(p))
    return simulate_conj_to_eq(norm, f, width=w, check=check)


# ---------------------------------------------------------------------------
# size accounting


def _pos1_size(arity: int, width: int, memo: dict) -> int:
    if width == 1:
        return 1
    return _stage_size(1, arity, width, arity, width, memo)


def _stage_size(i: int, j: int, k: int, arity: int, width: int, memo: dict) -> int:
    key = (i, j, k)
    if key in memo:
        return memo[key]
    if i == 1:
        if j == 1 and k == 2:
            size = 3
        elif j == 1:
            size = 2 + _stage_size(1, 1, k - 1, arity, width, memo)
        elif k == 2:
            size = 1 + 2 * _stage_size(1, j - 1, width, arity, width, memo)
        else:
            size = (1 + _stage_size(1, j, k - 1, arity, width, memo)
                    + _stage_size(1, j - 1, width, arity, width, memo))
    else:
        nxt = (_pos1_size(arity, width, memo) if i == 2
               else _stage_size(i - 1, arity, width, arity, width, memo))
        if j == 1 and k == 1:
            size = 3 + 2 * nxt
        elif j == 1:
            size = 3 + _stage_size(i, 1, k - 1, arity, width, memo) + nxt
        elif k == 1:
            size = 2 + 2 * nxt + _stage_size(i, j - 1, width, arity, width, memo)
        else:
            size = (2 + _stage_size(i, j, k - 1, arity, width, memo)
                    + _stage_size(i, j - 1, width, arity, width, memo) + nxt)
    memo[key] = size
    return size


def stage_size_exact(position: int, ineq_index: int, bit_step: int,
                     arity: int, width: int) -> int:
    """Exact vertex count of one stage subtree in the all-conjunction
    candidate model, leaf references included."""
    if position < 1 or ineq_index < 1 or ineq_index > arity:
        raise InputError("bad stage parameters")
    if position == 1:
        if width < 2 or not 2 <= bit_step <= width:
            raise InputError("position-1 stages need width >= 2 and bit step in 2..width")
    elif not 1 <= bit_step <= width:
        raise InputError("bit step out of range")
    return _stage_size(position, ineq_index, bit_step, arity, width, {})


def tree_size_exact(candidates: int, arity: int, width: int) -> int:
    """Exact size of the full search tree over the given number of
    conjunction candidates (sinks in a real child list only make the
    tree smaller)."""
    if candidates < 1 or arity < 1 or width < 1:
        raise InputError("bad tree parameters")
    memo: dict = {}
    if candidates == 1:
        if width == 1:
            return 2  # a root carrying the entry condition plus the forced leaf
        return _stage_size(1, arity, width, arity, width, memo)
    return _stage_size(candidates, arity, width, arity, width, memo)


@dataclass(frozen=True)
class SizeAccounting:
    input_size: int
    width: int
    arity: int
    degree: int
    skeleton_bound: int
    top_tree: int
    inner_trees: int
    exact_bound: int
    closed_form_bound: int
    closed_form_valid: bool

    def render(self) -> str:
        lines = [
            f"input size       {self.input_size}",
            f"width            {self.width}",
            f"arity            {self.arity}",
            f"degree           {self.degree}",
            f"skeleton bound   {self.skeleton_bound}",
            f"search trees     {self.top_tree + self.inner_trees}",
            f"exact bound      {self.exact_bound}",
            f"closed form      {self.closed_form_bound}"
            + ("" if self.closed_form_valid else "  (outside validity, width < 10)"),
        ]
        return "\n".join(lines)


def size_accounting(size: int, width: int, arity: int, degree: int,
                    child_counts: Sequence[int]) -> SizeAccounting:
    """Bounds for the simulated output: the exact bound adds up the
    skeleton and the exact tree sizes; the closed form
    2 s w^(2cd + c - 1) + 2 w^(2c - 1) is only claimed for width >= 10."""
    inner = len(child_counts)
    sinks = size - inner
    if sinks < 0:
        raise InputError("more child counts than vertices")
    for count in child_counts:
        if count < 1:
            raise InputError("inner vertices need at least one child")
    per_vertex = width ** arity
    skeleton = sinks + inner * per_vertex
    top = tree_size_exact(1, arity, width)
    inner_trees = sum(per_vertex * tree_size_exact(count, arity, width)
                      for count in child_counts)
    closed = (2 * size * width ** (2 * arity * degree + arity - 1)
              + 2 * width ** (2 * arity - 1))
    return SizeAccounting(
        input_size=size, width=width, arity=arity, degree=degree,
        skeleton_bound=skeleton, top_tree=top, inner_trees=inner_trees,
        exact_bound=skeleton + top + inner_trees,
        closed_form_bound=closed, closed_form_valid=width >= 10)


def conjunction_params(p: Protocol) -> tuple[int, int, list[int], int]:
    """(size, arity, per-inner-vertex child counts, minimal width) of a
    conjunction protocol, as consumed by `size_accounting`."""
    view, arity = _conjunction_view(p)
    counts = [len(view.children[v]) for v in view.inner_ids()]
    return p.size, arity, counts, _resolve_width(view, None)
