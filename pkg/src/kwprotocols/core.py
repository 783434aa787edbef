"""Core data model for dag-like communication protocols over monotone
Karchmer-Wigderson games.

A game instance is given by a partial monotone function: a set of inputs
mapped to 0 (written ``x``, the zeros side) and a set mapped to 1 (written
``y``, the ones side).  A protocol is a dag whose inner vertices carry a
feasibility label (a relation between an x-side and a y-side value) and
whose sinks carry a coordinate index.  This module holds the shared
vocabulary: bit strings, functions, value tables, labels, protocols, and
the label-level primitives (evaluation, bit-level encoding, rank
normalization).

Conventions:

* Bit positions are 1-based and count from the most significant bit.
* x-side data may depend only on ``x`` and y-side data only on ``y``.
* Sinks store an index, never a label; their feasibility is the fixed
  relation ``x_i = 0 and y_i = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Mapping, Union


class KwError(Exception):
    """Base class for every error raised by this package."""


class InputError(KwError):
    """A caller violated a precondition or passed malformed data."""


class DomainError(KwError):
    """A value table was consulted outside its domain."""


# ---------------------------------------------------------------------------
# bit strings


@dataclass(frozen=True)
class BitString:
    """An immutable bit sequence; position 1 is the most significant bit.

    Equality is length-sensitive: ``parse("01")`` and ``parse("1")`` are
    distinct values even though both read as the number 1.
    """

    bits: tuple[int, ...]

    def __post_init__(self):
        if not all(b in (0, 1) for b in self.bits):
            raise InputError(f"bits must be 0 or 1: {self.bits!r}")

    @classmethod
    def parse(cls, text: str) -> "BitString":
        if not all(ch in "01" for ch in text):
            raise InputError(f"not a bit string: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitString":
        """The ``width``-bit big-endian representation of ``value``."""
        if width < 0:
            raise InputError(f"negative width: {width}")
        if value < 0 or (value >> width):
            raise InputError(f"value {value} does not fit in {width} bits")
        return cls(tuple((value >> (width - i)) & 1 for i in range(1, width + 1)))

    def bit(self, i: int) -> int:
        """The i-th most significant bit, 1-based."""
        if not 1 <= i <= len(self.bits):
            raise InputError(f"bit position {i} out of range for width {len(self.bits)}")
        return self.bits[i - 1]

    def to_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def concat(self, other: "BitString") -> "BitString":
        return BitString(self.bits + other.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __repr__(self) -> str:
        return f"BitString({str(self)!r})"


def bitstring_sort_key(s: BitString) -> tuple[int, int]:
    # Total order on bit strings of mixed widths: by width, then numerically.
    return (len(s), s.to_int())


# ---------------------------------------------------------------------------
# partial monotone functions


@dataclass(frozen=True)
class PartialMonotoneFunction:
    """A partial function on n-bit strings given by its zeros and ones.

    Disjointness of the two sides is enforced here; compatibility with
    some total monotone function is not, so that `check_monotone` has
    violations to report.
    """

    n: int
    zeros: frozenset[BitString]
    ones: frozenset[BitString]

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"n must be at least 1, got {self.n}")
        for s in self.zeros | self.ones:
            if len(s) != self.n:
                raise InputError(f"input {s} does not have length {self.n}")
        common = self.zeros & self.ones
        if common:
            raise InputError(f"zeros and ones overlap: {sorted(str(s) for s in common)}")

    @classmethod
    def from_strings(cls, n, zeros, ones) -> "PartialMonotoneFunction":
        return cls(
            n,
            frozenset(BitString.parse(s) for s in zeros),
            frozenset(BitString.parse(s) for s in ones),
        )

    def sorted_zeros(self) -> list[BitString]:
        return sorted(self.zeros, key=lambda s: s.bits)

    def sorted_ones(self) -> list[BitString]:
        return sorted(self.ones, key=lambda s: s.bits)

    def pairs(self) -> Iterator[tuple[BitString, BitString]]:
        """All (x, y) pairs with x mapped to 0 and y mapped to 1, sorted."""
        for x in self.sorted_zeros():
            for y in self.sorted_ones():
                yield x, y


def check_monotone(f: PartialMonotoneFunction):
    """Is f extendable to a total monotone function?

    Returns None when no obstruction exists, otherwise the first pair
    (x, y) with y coordinatewise below x; such a pair also means the
    game has no solution coordinate for (x, y).
    """
    for x in f.sorted_zeros():
        for y in f.sorted_ones():
            if all(y.bits[i] <= x.bits[i] for i in range(f.n)):
                return (x, y)
    return None


def solution_indices(x: BitString, y: BitString) -> list[int]:
    """All coordinates i with x_i = 0 and y_i = 1, in increasing order."""
    if len(x) != len(y):
        raise InputError("inputs have different lengths")
    return [i for i in range(1, len(x) + 1) if x.bit(i) == 0 and y.bit(i) == 1]


# ---------------------------------------------------------------------------
# value tables

Value = Union[int, float, Fraction, BitString]


@dataclass(frozen=True)
class ValueTable:
    """A finite map from inputs of one side to comparison values.

    Values are integers (possibly negative, arbitrary precision),
    rationals before normalization, or fixed-width bit strings for
    equality labels produced by bit-level encoding.
    """

    side: str
    entries: dict[BitString, Value]

    def __post_init__(self):
        if self.side not in ("x", "y"):
            raise InputError(f"side must be 'x' or 'y', got {self.side!r}")

    def get(self, s: BitString) -> Value:
        try:
            return self.entries[s]
        except KeyError:
            raise DomainError(f"no {self.side}-side value for {s}") from None

    def sorted_items(self) -> list[tuple[BitString, Value]]:
        return sorted(self.entries.items(), key=lambda kv: kv[0].bits)

    def map_values(self, fn) -> "ValueTable":
        return ValueTable(self.side, {k: fn(v) for k, v in self.entries.items()})

    def __repr__(self) -> str:
        return f"ValueTable({self.side!r}, {len(self.entries)} entries)"


def _is_number(v) -> bool:
    return isinstance(v, (int, float, Fraction)) and not isinstance(v, bool)


def value_less(a: Value, b: Value) -> bool:
    if _is_number(a) and _is_number(b):
        return a < b
    if isinstance(a, BitString) and isinstance(b, BitString):
        if len(a) != len(b):
            raise InputError(f"comparing bit strings of widths {len(a)} and {len(b)}")
        return a.to_int() < b.to_int()
    raise InputError(f"cannot order values {a!r} and {b!r}")


def value_equal(a: Value, b: Value) -> bool:
    if _is_number(a) and _is_number(b):
        return a == b
    if isinstance(a, BitString) and isinstance(b, BitString):
        return a == b
    raise InputError(f"cannot compare values {a!r} and {b!r}")


# ---------------------------------------------------------------------------
# bit terms and bit-level conjunctions


@dataclass(frozen=True)
class BitTerm:
    """A single bit read off one side of the input.

    Three kinds exist: a constant, an input coordinate (``x_i`` or
    ``y_i``), or one bit of a table value (``q(x)`` read as a fixed-width
    number, position 1 most significant).  Structural equality of table
    terms goes through ``table_key``, a stable identity for the table,
    so that terms created in different trees compare equal; the table
    object itself only serves evaluation.
    """

    kind: str
    side: str | None = None
    value: int = 0
    index: int = 0
    width: int = 0
    table: ValueTable | None = field(default=None, compare=False, repr=False)
    table_key: tuple | None = None
    negated: bool = False

    @classmethod
    def constant(cls, value: int) -> "BitTerm":
        if value not in (0, 1):
            raise InputError(f"constant bit must be 0 or 1, got {value}")
        return cls(kind="const", value=value)

    @classmethod
    def input_bit(cls, side: str, index: int, negated: bool = False) -> "BitTerm":
        if side not in ("x", "y"):
            raise InputError(f"side must be 'x' or 'y', got {side!r}")
        if index < 1:
            raise InputError(f"input coordinate must be positive, got {index}")
        return cls(kind="input", side=side, index=index, negated=negated)

    @classmethod
    def table_bit(cls, table: ValueTable, key: tuple, position: int, width: int,
                  negated: bool = False) -> "BitTerm":
        if not 1 <= position <= width:
            raise InputError(f"bit position {position} out of range for width {width}")
        return cls(kind="table", side=table.side, index=position, width=width,
                   table=table, table_key=key, negated=negated)

    def negate(self) -> "BitTerm":
        return replace(self, negated=not self.negated)

    def eval(self, s: BitString) -> int:
        if self.kind == "const":
            bit = self.value
        elif self.kind == "input":
            bit = s.bit(self.index)
        elif self.kind == "table":
            v = self.table.get(s)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0 or (v >> self.width):
                raise InputError(
                    f"table value {v!r} for {s} is not a {self.width}-bit integer")
            bit = (v >> (self.width - self.index)) & 1
        else:
            raise InputError(f"unknown bit term kind {self.kind!r}")
        return bit ^ 1 if self.negated else bit


@dataclass(frozen=True)
class BitEqualityConjunction:
    """An ordered conjunction of bitwise equalities lhs = rhs.

    Every lhs reads the x side, every rhs the y side; constants are
    side-neutral.  The empty conjunction is true for every input pair.
    """

    pairs: tuple[tuple[BitTerm, BitTerm], ...] = ()

    def __post_init__(self):
        for lhs, rhs in self.pairs:
            if lhs.side == "y":
                raise InputError("left term of a bit equality must not read the y side")
            if rhs.side == "x":
                raise InputError("right term of a bit equality must not read the x side")

    def extend(self, new_pairs) -> "BitEqualityConjunction":
        return BitEqualityConjunction(self.pairs + tuple(new_pairs))

    def evaluate(self, x: BitString, y: BitString) -> bool:
        return all(lhs.eval(x) == rhs.eval(y) for lhs, rhs in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def sink_equality_conjunction(index: int) -> BitEqualityConjunction:
    """The canonical bit-level form of sink feasibility at coordinate i.

    Encodes x_i = 0 and 1 = y_i, so the encoded tables are
    q(x) = (x_i, 1) and r(y) = (0, y_i).
    """
    return BitEqualityConjunction((
        (BitTerm.input_bit("x", index), BitTerm.constant(0)),
        (BitTerm.constant(1), BitTerm.input_bit("y", index)),
    ))


def encode_bit_conjunction(conj: BitEqualityConjunction, zeros, ones
                           ) -> tuple[ValueTable, ValueTable]:
    """Turn a bit-level conjunction into a pair of equality tables.

    q(x) concatenates the lhs bits, r(y) the rhs bits, both as
    bit strings of the conjunction's length; the conjunction holds on
    (x, y) exactly when q(x) = r(y).
    """
    q = {x: BitString(tuple(lhs.eval(x) for lhs, _ in conj.pairs)) for x in zeros}
    r = {y: BitString(tuple(rhs.eval(y) for _, rhs in conj.pairs)) for y in ones}
    return ValueTable("x", q), ValueTable("y", r)


# ---------------------------------------------------------------------------
# feasibility labels


class FeasibilityLabel:
    """Marker base for the label variants an inner vertex may carry."""


@dataclass(frozen=True)
class Inequality(FeasibilityLabel):
    """Feasible when q(x) < r(y)."""

    q: ValueTable
    r: ValueTable

    def __post_init__(self):
        _require_sides(self.q, self.r)


@dataclass(frozen=True)
class Equality(FeasibilityLabel):
    """Feasible when q(x) = r(y)."""

    q: ValueTable
    r: ValueTable

    def __post_init__(self):
        _require_sides(self.q, self.r)


@dataclass(frozen=True)
class Conjunction(FeasibilityLabel):
    """Feasible when q_j(x) < r_j(y) holds for every pair j."""

    pairs: tuple[tuple[ValueTable, ValueTable], ...]

    def __post_init__(self):
        if not self.pairs:
            raise InputError("a conjunction label needs at least one table pair")
        for q, r in self.pairs:
            _require_sides(q, r)

    @property
    def arity(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class BitConjunction(FeasibilityLabel):
    """Feasible when the wrapped bit-level conjunction holds."""

    conjunction: BitEqualityConjunction


def _require_sides(q: ValueTable, r: ValueTable):
    if q.side != "x" or r.side != "y":
        raise InputError("label tables must pair an x-side q with a y-side r")


def eval_label(label: FeasibilityLabel, x: BitString, y: BitString) -> bool:
    if isinstance(label, Inequality):
        return value_less(label.q.get(x), label.r.get(y))
    if isinstance(label, Equality):
        return value_equal(label.q.get(x), label.r.get(y))
    if isinstance(label, Conjunction):
        return all(value_less(q.get(x), r.get(y)) for q, r in label.pairs)
    if isinstance(label, BitConjunction):
        return label.conjunction.evaluate(x, y)
    raise InputError(f"not a feasibility label: {label!r}")


# ---------------------------------------------------------------------------
# protocols


@dataclass(frozen=True)
class Vertex:
    """One protocol vertex: a labelled inner vertex or an indexed sink."""

    label: FeasibilityLabel | None = None
    index: int | None = None

    @property
    def is_sink(self) -> bool:
        return self.index is not None


@dataclass(frozen=True)
class Protocol:
    """A dag protocol.  Vertex ids are dense 0..size-1; child order matters.

    The constructor only enforces shape consistency between the vertex
    and child lists.  Semantic requirements (unique source, acyclicity,
    degree bound, sink indices in range) are reported by
    `check_wellformed` so that defective protocols remain constructible
    and inspectable.
    """

    n: int
    degree: int
    vertices: tuple[Vertex, ...]
    children: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"n must be at least 1, got {self.n}")
        if len(self.vertices) != len(self.children):
            raise InputError("one child list per vertex is required")
        if not self.vertices:
            raise InputError("a protocol needs at least one vertex")

    @property
    def size(self) -> int:
        return len(self.vertices)

    def in_degrees(self) -> list[int]:
        counts = [0] * self.size
        for kids in self.children:
            for k in kids:
                counts[k] += 1
        return counts

    def source(self) -> int:
        roots = [v for v, d in enumerate(self.in_degrees()) if d == 0]
        if len(roots) != 1:
            raise InputError(f"protocol does not have a unique source: {roots}")
        return roots[0]

    def sink_ids(self) -> list[int]:
        return [v for v, vert in enumerate(self.vertices) if vert.is_sink]

    def inner_ids(self) -> list[int]:
        return [v for v, vert in enumerate(self.vertices) if not vert.is_sink]

    def __repr__(self) -> str:
        return (f"Protocol(n={self.n}, degree={self.degree}, "
                f"size={self.size})")


def eval_vertex(p: Protocol, vid: int, x: BitString, y: BitString) -> bool:
    """Feasibility of one vertex for the pair (x, y).

    Sink feasibility is by definition the relation x_i = 0 and y_i = 1,
    regardless of anything else stored in the protocol.
    """
    if not 0 <= vid < p.size:
        raise InputError(f"vertex id {vid} out of range")
    vert = p.vertices[vid]
    if vert.index is not None:
        return x.bit(vert.index) == 0 and y.bit(vert.index) == 1
    if vert.label is None:
        raise InputError(f"vertex {vid} has neither label nor sink index")
    try:
        return eval_label(vert.label, x, y)
    except DomainError as e:
        raise DomainError(f"vertex {vid}: {e}") from None


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class Violation:
    condition: str
    vertex: int | None = None
    x: BitString | None = None
    y: BitString | None = None
    detail: str = ""

    def render(self) -> str:
        parts = [self.condition]
        if self.vertex is not None:
            parts.append(f"vertex={self.vertex}")
        if self.x is not None:
            parts.append(f"x={self.x}")
        if self.y is not None:
            parts.append(f"y={self.y}")
        if self.detail:
            parts.append(self.detail)
        return " ".join(parts)


@dataclass(frozen=True)
class Report:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def render(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(v.render() for v in self.violations)


def check_wellformed(p: Protocol) -> Report:
    """Structural validity: roles, edges, unique source, acyclicity,
    degree bound, sink indices."""
    out: list[Violation] = []
    for vid, vert in enumerate(p.vertices):
        if (vert.label is None) == (vert.index is None):
            out.append(Violation("vertex-role", vertex=vid,
                                 detail="needs exactly one of label, sink index"))
    for vid, kids in enumerate(p.children):
        for k in kids:
            if not 0 <= k < p.size:
                out.append(Violation("edge-range", vertex=vid,
                                     detail=f"child {k} out of range"))
    # The remaining checks assume edges are in range.
    if not any(v.condition == "edge-range" for v in out):
        indeg = p.in_degrees()
        roots = [v for v, d in enumerate(indeg) if d == 0]
        if not roots:
            out.append(Violation("no-source"))
        elif len(roots) > 1:
            out.append(Violation("multiple-sources", detail=f"vertices {roots}"))
        order, seen = [], [0] * p.size
        stack = list(roots)
        degs = list(indeg)
        while stack:
            v = stack.pop()
            order.append(v)
            for k in p.children[v]:
                degs[k] -= 1
                if degs[k] == 0:
                    stack.append(k)
        if len(order) != p.size:
            leftover = [v for v in range(p.size) if degs[v] > 0]
            out.append(Violation("cycle", detail=f"vertices {leftover}"))
        for vid, vert in enumerate(p.vertices):
            kids = p.children[vid]
            if len(kids) > p.degree:
                out.append(Violation("degree-exceeded", vertex=vid,
                                     detail=f"out-degree {len(kids)} > {p.degree}"))
            if vert.is_sink:
                if kids:
                    out.append(Violation("sink-with-children", vertex=vid))
                if not 1 <= vert.index <= p.n:
                    out.append(Violation("sink-index-range", vertex=vid,
                                         detail=f"index {vert.index}"))
            elif vert.label is not None and not kids:
                out.append(Violation("inner-no-children", vertex=vid))
    return Report(tuple(out))


# ---------------------------------------------------------------------------
# rank normalization


def _label_table_pairs(label: FeasibilityLabel) -> list[tuple[ValueTable, ValueTable]]:
    if isinstance(label, (Inequality, Equality)):
        return [(label.q, label.r)]
    if isinstance(label, Conjunction):
        return list(label.pairs)
    raise InputError(
        "rank normalization applies to inequality, equality, and conjunction labels")


def _rebuild_label(label: FeasibilityLabel, pairs) -> FeasibilityLabel:
    if isinstance(label, Inequality):
        return Inequality(*pairs[0])
    if isinstance(label, Equality):
        return Equality(*pairs[0])
    return Conjunction(tuple(pairs))


def _rank_map(values) -> dict:
    numbers = [v for v in values if _is_number(v)]
    strings = [v for v in values if isinstance(v, BitString)]
    if len(numbers) + len(strings) != len(values):
        bad = next(v for v in values if not _is_number(v) and not isinstance(v, BitString))
        raise InputError(f"value {bad!r} cannot be rank normalized")
    if numbers and strings:
        raise InputError("a table pair mixes numeric and bit string values")
    for v in numbers:
        if isinstance(v, float) and not math.isfinite(v):
            raise InputError(f"non-finite value {v!r}")
    if strings:
        ordered = sorted(set(strings), key=bitstring_sort_key)
    else:
        # Mixed int/float/Fraction values compare exactly in Python, and
        # numerically equal values collapse to a single rank.
        ordered = sorted(set(numbers))
    return {v: i for i, v in enumerate(ordered)}


def rank_normalize(p: Protocol) -> tuple[Protocol, int]:
    """Replace every table value by its rank among the values of its pair.

    Only the relative order of values within one (vertex, pair) table
    pair matters for any label verdict, so ranks 0..m-1 preserve every
    verdict on the table domains.  Returns the normalized protocol and
    the global bit width w = max(1, ceil(log2 max-m)), which every
    normalized value fits in.
    """
    max_m = 1
    new_vertices = []
    for vid, vert in enumerate(p.vertices):
        if vert.is_sink:
            new_vertices.append(vert)
            continue
        pairs = _label_table_pairs(vert.label)
        new_pairs = []
        for q, r in pairs:
            rank = _rank_map(list(q.entries.values()) + list(r.entries.values()))
            max_m = max(max_m, len(rank))
            new_pairs.append((q.map_values(lambda v: rank[v]),
                              r.map_values(lambda v: rank[v])))
        new_vertices.append(Vertex(label=_rebuild_label(vert.label, new_pairs)))
    width = max(1, (max_m - 1).bit_length())
    return Protocol(p.n, p.degree, tuple(new_vertices), p.children), width
