"""Line-oriented text formats for functions, protocols, CNFs, and
proofs, plus DOT export.

All serializers are canonical: entries sorted, ids dense, one fact per
line, so identical values serialize byte-identically and canonical
files round-trip exactly.  Parsers skip blank lines and '#' comments
and report the offending line on errors.

Equality values of bit-string type are written as <bitlen>:<hex> so
that width is part of the value, matching the length-sensitive
equality the labels use.  Derived proof lines carry no clause bodies;
clauses are recomputed by rule application while parsing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
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
    bitstring_sort_key,
)
from .formulas import Cnf, ResolutionProof, ResStep, VariablePartition
from .reslin import (
    Addition,
    Axiom,
    Contraction,
    LinearPolynomial,
    RlinClause,
    RlinLine,
    RlinRefutation,
)


class ParseError(KwError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield no, stripped


def _bits(token: str, no: int) -> BitString:
    if not token or any(ch not in "01" for ch in token):
        raise ParseError(f"bad bitstring {token!r}", no)
    return BitString.parse(token)


def _int(token: str, no: int, what: str = "integer") -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"bad {what} {token!r}", no) from None


# ---------------------------------------------------------------------------
# values


def serialize_value(v) -> str:
    if isinstance(v, bool):
        raise InputError("boolean values are not serializable")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, BitString):
        width = len(v)
        digits = (width + 3) // 4
        return f"{width}:{v.to_int():0{digits}x}" if digits else f"{width}:"
    raise InputError(f"value {v!r} is not serializable; normalize first")


def parse_value(token: str, no: int):
    if ":" in token:
        width_part, _, hex_part = token.partition(":")
        width = _int(width_part, no, "bit width")
        if width < 0:
            raise ParseError(f"negative width in {token!r}", no)
        try:
            value = int(hex_part, 16) if hex_part else 0
        except ValueError:
            raise ParseError(f"bad hex digits in {token!r}", no) from None
        if value >> width:
            raise ParseError(f"value does not fit {width} bits in {token!r}", no)
        return BitString.from_int(value, width)
    if "/" in token:
        num, _, den = token.partition("/")
        return Fraction(_int(num, no, "numerator"), _int(den, no, "denominator"))
    return _int(token, no, "value")


# ---------------------------------------------------------------------------
# functions


def parse_function(text: str) -> PartialMonotoneFunction:
    n = None
    zeros: list = []
    ones: list = []
    section = None
    for no, line in _lines(text):
        if line.startswith("n="):
            if n is not None:
                raise ParseError("repeated n= header", no)
            n = _int(line[2:], no, "n")
            continue
        if line == "zeros:":
            section = zeros
            continue
        if line == "ones:":
            section = ones
            continue
        if n is None or section is None:
            raise ParseError(f"unexpected {line!r} before headers", no)
        section.append(_bits(line, no))
    if n is None:
        raise ParseError("missing n= header")
    try:
        return PartialMonotoneFunction(n, frozenset(zeros), frozenset(ones))
    except InputError as e:
        raise ParseError(str(e)) from None


def serialize_function(f: PartialMonotoneFunction) -> str:
    out = [f"n={f.n}", "zeros:"]
    out.extend(str(s) for s in f.sorted_zeros())
    out.append("ones:")
    out.extend(str(s) for s in f.sorted_ones())
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# protocols


def _serialize_table(prefix: str, table: ValueTable) -> list:
    return [f"{prefix} {key} {serialize_value(val)}"
            for key, val in table.sorted_items()]


def _serialize_term(term: BitTerm) -> str:
    if term.kind == "const":
        return str(term.value ^ (1 if term.negated else 0))
    if term.kind == "input":
        neg = "!" if term.negated else ""
        return f"{neg}{term.side}{term.index}"
    raise InputError(
        "table-backed bit terms have no text form; encode the protocol first")


def _parse_term(token: str, no: int) -> BitTerm:
    neg = token.startswith("!")
    body = token[1:] if neg else token
    if body in ("0", "1"):
        if neg:
            raise ParseError(f"bad term {token!r}", no)
        return BitTerm.constant(int(body))
    if body[:1] in ("x", "y") and body[1:].isdigit():
        return BitTerm.input_bit(body[0], int(body[1:]), negated=neg)
    raise ParseError(f"bad term {token!r}", no)


def serialize_protocol(p: Protocol) -> str:
    out = [f"n={p.n}", f"degree={p.degree}"]
    for vid, vert in enumerate(p.vertices):
        if vert.is_sink:
            out.append(f"vertex {vid} sink {vert.index}")
            continue
        lab = vert.label
        if isinstance(lab, Inequality):
            out.append(f"vertex {vid} inner ineq")
            out.extend(_serialize_table("q", lab.q))
            out.extend(_serialize_table("r", lab.r))
        elif isinstance(lab, Equality):
            out.append(f"vertex {vid} inner eq")
            out.extend(_serialize_table("q", lab.q))
            out.extend(_serialize_table("r", lab.r))
        elif isinstance(lab, Conjunction):
            out.append(f"vertex {vid} inner conj {lab.arity}")
            for j, (q, r) in enumerate(lab.pairs, start=1):
                out.extend(_serialize_table(f"q {j}", q))
                out.extend(_serialize_table(f"r {j}", r))
        elif isinstance(lab, BitConjunction):
            out.append(f"vertex {vid} inner bitconj")
            for lhs, rhs in lab.conjunction.pairs:
                out.append(f"pair {_serialize_term(lhs)} {_serialize_term(rhs)}")
        else:
            raise InputError(f"vertex {vid}: unserializable label {lab!r}")
    for vid, kids in enumerate(p.children):
        for kid in kids:
            out.append(f"edge {vid} {kid}")
    return "\n".join(out) + "\n"


class _VertexDraft:
    def __init__(self, kind, no, index=None, arity=None):
        self.kind = kind
        self.no = no
        self.index = index
        self.arity = arity
        self.tables: dict = {}
        self.pairs: list = []

    def table(self, prefix, j):
        return self.tables.setdefault((prefix, j), {})

    def build(self, vid: int) -> Vertex:
        if self.kind == "sink":
            return Vertex(index=self.index)
        try:
            if self.kind in ("ineq", "eq"):
                q = ValueTable("x", self.table("q", 1))
                r = ValueTable("y", self.table("r", 1))
                cls = Inequality if self.kind == "ineq" else Equality
                return Vertex(label=cls(q, r))
            if self.kind == "conj":
                pairs = tuple(
                    (ValueTable("x", self.table("q", j)),
                     ValueTable("y", self.table("r", j)))
                    for j in range(1, self.arity + 1))
                return Vertex(label=Conjunction(pairs))
            return Vertex(label=BitConjunction(
                BitEqualityConjunction(tuple(self.pairs))))
        except InputError as e:
            raise ParseError(f"vertex {vid}: {e}", self.no) from None


def parse_protocol(text: str) -> Protocol:
    n = None
    degree = None
    drafts: dict = {}
    edges: list = []
    current: Optional[_VertexDraft] = None
    for no, line in _lines(text):
        parts = line.split()
        head = parts[0]
        if head.startswith("n="):
            n = _int(head[2:], no, "n")
            continue
        if head.startswith("degree="):
            degree = _int(head[7:], no, "degree")
            continue
        if head == "vertex":
            if len(parts) < 3:
                raise ParseError("vertex needs an id and a role", no)
            vid = _int(parts[1], no, "vertex id")
            if vid in drafts:
                raise ParseError(f"repeated vertex {vid}", no)
            role = parts[2]
            if role == "sink":
                if len(parts) != 4:
                    raise ParseError("sink needs exactly an index", no)
                current = _VertexDraft("sink", no, index=_int(parts[3], no, "index"))
            elif role == "inner":
                if len(parts) < 4:
                    raise ParseError("inner vertex needs a label kind", no)
                kind = parts[3]
                if kind in ("ineq", "eq"):
                    if len(parts) != 4:
                        raise ParseError(f"{kind} takes no arguments", no)
                    current = _VertexDraft(kind, no)
                elif kind == "conj":
                    if len(parts) != 5:
                        raise ParseError("conj needs an arity", no)
                    current = _VertexDraft(kind, no, arity=_int(parts[4], no, "arity"))
                elif kind == "bitconj":
                    current = _VertexDraft(kind, no)
                else:
                    raise ParseError(f"unknown label kind {kind!r}", no)
            else:
                raise ParseError(f"unknown vertex role {role!r}", no)
            drafts[vid] = current
            continue
        if head in ("q", "r"):
            if current is None or current.kind not in ("ineq", "eq", "conj"):
                raise ParseError("table entry outside a table label", no)
            if current.kind == "conj":
                if len(parts) != 4:
                    raise ParseError("conj entries need a pair index", no)
                j = _int(parts[1], no, "pair index")
                if not current.arity or not 1 <= j <= current.arity:
                    raise ParseError(f"pair index {j} out of range", no)
                key, val = parts[2], parts[3]
            else:
                if len(parts) != 3:
                    raise ParseError(f"bad {head} entry", no)
                j, key, val = 1, parts[1], parts[2]
            table = current.table(head, j)
            bits = _bits(key, no)
            if bits in table:
                raise ParseError(f"repeated key {key}", no)
            table[bits] = parse_value(val, no)
            continue
        if head == "pair":
            if current is None or current.kind != "bitconj":
                raise ParseError("pair outside a bitconj label", no)
            if len(parts) != 3:
                raise ParseError("pair needs two terms", no)
            current.pairs.append((_parse_term(parts[1], no), _parse_term(parts[2], no)))
            continue
        if head == "edge":
            if len(parts) != 3:
                raise ParseError("edge needs two vertex ids", no)
            edges.append((_int(parts[1], no, "vertex id"),
                          _int(parts[2], no, "vertex id"), no))
            continue
        raise ParseError(f"unexpected {head!r}", no)
    if n is None or degree is None:
        raise ParseError("missing n= or degree= header")
    if set(drafts) != set(range(len(drafts))):
        raise ParseError("vertex ids are not dense from 0")
    vertices = tuple(drafts[vid].build(vid) for vid in range(len(drafts)))
    children: list = [[] for _ in drafts]
    for parent, child, no in edges:
        if parent not in drafts:
            raise ParseError(f"edge from unknown vertex {parent}", no)
        children[parent].append(child)
    try:
        return Protocol(n, degree, vertices, tuple(tuple(k) for k in children))
    except InputError as e:
        raise ParseError(str(e)) from None


# ---------------------------------------------------------------------------
# CNF (DIMACS with block comments)


@dataclass(frozen=True)
class CnfDocument:
    cnf: Cnf
    partition: Optional[VariablePartition] = None
    phi_count: Optional[int] = None

    def split(self):
        """(phi clauses, psi clauses) per the phi marker."""
        if self.phi_count is None:
            raise InputError("the CNF carries no phi marker")
        return (self.cnf.clauses[:self.phi_count],
                self.cnf.clauses[self.phi_count:])


def parse_cnf(text: str) -> CnfDocument:
    blocks = {"x": [], "y": [], "z": []}
    phi_count = None
    nvars = None
    expected = None
    clauses: list = []
    for no, line in _lines(text):
        parts = line.split()
        if parts[0] == "c":
            if len(parts) >= 2 and parts[1] in blocks:
                blocks[parts[1]].extend(_int(t, no, "variable") for t in parts[2:])
            elif len(parts) == 3 and parts[1] == "phi":
                phi_count = _int(parts[2], no, "clause count")
            continue
        if parts[0] == "p":
            if parts[1:2] != ["cnf"] or len(parts) != 4:
                raise ParseError("bad problem line", no)
            nvars = _int(parts[2], no, "variable count")
            expected = _int(parts[3], no, "clause count")
            continue
        if nvars is None:
            raise ParseError("clause before the problem line", no)
        lits = [_int(t, no, "literal") for t in parts]
        if not lits or lits[-1] != 0:
            raise ParseError("clause does not end with 0", no)
        if 0 in lits[:-1]:
            raise ParseError("literal 0 inside a clause", no)
        clauses.append(frozenset(lits[:-1]))
    if nvars is None:
        raise ParseError("missing problem line")
    if expected != len(clauses):
        raise ParseError(f"expected {expected} clauses, found {len(clauses)}")
    try:
        cnf = Cnf(nvars, tuple(clauses))
    except InputError as e:
        raise ParseError(str(e)) from None
    partition = None
    if any(blocks.values()):
        try:
            partition = VariablePartition(tuple(blocks["x"]),
                                          frozenset(blocks["y"]),
                                          frozenset(blocks["z"]))
        except InputError as e:
            raise ParseError(str(e)) from None
    if phi_count is not None and not 0 <= phi_count <= len(clauses):
        raise ParseError(f"phi marker {phi_count} out of range")
    return CnfDocument(cnf, partition, phi_count)


def serialize_cnf(doc: CnfDocument) -> str:
    out = []
    if doc.partition is not None:
        part = doc.partition
        out.append("c x " + " ".join(str(v) for v in part.x))
        out.append("c y " + " ".join(str(v) for v in sorted(part.y)))
        out.append("c z " + " ".join(str(v) for v in sorted(part.z)))
    if doc.phi_count is not None:
        out.append(f"c phi {doc.phi_count}")
    out.append(f"p cnf {doc.cnf.nvars} {len(doc.cnf.clauses)}")
    for clause in doc.cnf.clauses:
        lits = sorted(clause, key=lambda l: (abs(l), l > 0))
        out.append(" ".join(str(l) for l in lits) + " 0")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# linear clauses and refutations


def serialize_polynomial(p: LinearPolynomial) -> str:
    parts = []
    if p.constant:
        parts.append("1")
    parts.extend(f"x{v}" for v in sorted(p.variables))
    return "+".join(parts) if parts else "0"


def parse_polynomial(token: str, no: int) -> LinearPolynomial:
    variables = set()
    constant = 0
    terms = token.split("+")
    for term in terms:
        term = term.strip()
        if term == "0":
            if len(terms) != 1:
                raise ParseError(f"0 inside a sum in {token!r}", no)
        elif term == "1":
            if constant:
                raise ParseError(f"repeated constant in {token!r}", no)
            constant = 1
        elif term.startswith("x") and term[1:].isdigit():
            v = int(term[1:])
            if v in variables:
                raise ParseError(f"repeated variable in {token!r}", no)
            variables.add(v)
        else:
            raise ParseError(f"bad polynomial term {term!r}", no)
    return LinearPolynomial(frozenset(variables), constant)


def serialize_linear_clause(clause: RlinClause) -> str:
    return "{" + "; ".join(serialize_polynomial(p)
                           for p in clause.sorted_polys()) + "}"


def parse_linear_clause(token: str, no: int) -> RlinClause:
    token = token.strip()
    if not (token.startswith("{") and token.endswith("}")):
        raise ParseError(f"clause must be braced, got {token!r}", no)
    body = token[1:-1].strip()
    if not body:
        return RlinClause(frozenset())
    return RlinClause(frozenset(parse_polynomial(part, no)
                                for part in body.split(";")))


def serialize_rlin(proof: RlinRefutation) -> str:
    out = []
    for pos, line in enumerate(proof.lines):
        rule = line.rule
        if isinstance(rule, Axiom):
            out.append(f"line {pos} axiom {serialize_linear_clause(line.clause)}")
        elif isinstance(rule, Addition):
            out.append(f"line {pos} add {rule.left} {rule.right} "
                       f"{serialize_polynomial(rule.g)} {serialize_polynomial(rule.h)}")
        elif isinstance(rule, Contraction):
            out.append(f"line {pos} contract {rule.line} "
                       f"{serialize_polynomial(rule.removed)}")
        else:
            raise InputError(f"line {pos}: unserializable rule {rule!r}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class RlinDocument:
    """A parsed refutation plus its axiom clauses in order of
    appearance; axiom rule indices point into that list."""

    axioms: tuple
    proof: RlinRefutation


def parse_rlin(text: str) -> RlinDocument:
    axioms: list = []
    lines: list = []
    for no, raw in _lines(text):
        parts = raw.split(None, 3)
        if parts[0] != "line" or len(parts) < 3:
            raise ParseError(f"expected a line record, got {raw!r}", no)
        pos = _int(parts[1], no, "line id")
        if pos != len(lines):
            raise ParseError(f"line ids must be sequential, expected {len(lines)}", no)
        rule = parts[2]
        rest = parts[3] if len(parts) > 3 else ""
        if rule == "axiom":
            clause = parse_linear_clause(rest, no)
            lines.append(RlinLine(clause, Axiom(len(axioms))))
            axioms.append(clause)
            continue
        if rule == "add":
            bits = rest.split()
            if len(bits) != 4:
                raise ParseError("add needs two premises and two polynomials", no)
            left = _int(bits[0], no, "premise")
            right = _int(bits[1], no, "premise")
            if not 0 <= left < pos or not 0 <= right < pos:
                raise ParseError("premise is not an earlier line", no)
            g = parse_polynomial(bits[2], no)
            h = parse_polynomial(bits[3], no)
            derived = ((lines[left].clause.polys - {g})
                       | (lines[right].clause.polys - {h})
                       | {g + h + LinearPolynomial.one()})
            lines.append(RlinLine(RlinClause(derived), Addition(left, right, g, h)))
            continue
        if rule == "contract":
            bits = rest.split()
            if len(bits) != 2:
                raise ParseError("contract needs a premise and a polynomial", no)
            ref = _int(bits[0], no, "premise")
            if not 0 <= ref < pos:
                raise ParseError("premise is not an earlier line", no)
            poly = parse_polynomial(bits[1], no)
            derived = lines[ref].clause.polys - {poly}
            lines.append(RlinLine(RlinClause(derived), Contraction(ref, poly)))
            continue
        raise ParseError(f"unknown rule {rule!r}", no)
    return RlinDocument(tuple(axioms), RlinRefutation(tuple(lines)))


# ---------------------------------------------------------------------------
# resolution proofs


def serialize_resolution(proof: ResolutionProof) -> str:
    out = []
    for pos, step in enumerate(proof.steps):
        if step.is_axiom:
            out.append(f"step {pos} axiom {step.axiom}")
        else:
            out.append(f"step {pos} resolve {step.left} {step.right} {step.pivot}")
    return "\n".join(out) + "\n"


def parse_resolution(text: str, cnf: Cnf) -> ResolutionProof:
    steps: list = []
    for no, raw in _lines(text):
        parts = raw.split()
        if parts[0] != "step" or len(parts) < 3:
            raise ParseError(f"expected a step record, got {raw!r}", no)
        pos = _int(parts[1], no, "step id")
        if pos != len(steps):
            raise ParseError(f"step ids must be sequential, expected {len(steps)}", no)
        if parts[2] == "axiom":
            if len(parts) != 4:
                raise ParseError("axiom needs a clause index", no)
            idx = _int(parts[3], no, "clause index")
            if not 0 <= idx < len(cnf.clauses):
                raise ParseError(f"clause index {idx} out of range", no)
            steps.append(ResStep(clause=frozenset(cnf.clauses[idx]), axiom=idx))
            continue
        if parts[2] == "resolve":
            if len(parts) != 6:
                raise ParseError("resolve needs two premises and a pivot", no)
            left = _int(parts[3], no, "premise")
            right = _int(parts[4], no, "premise")
            pivot = _int(parts[5], no, "pivot")
            if not 0 <= left < pos or not 0 <= right < pos:
                raise ParseError("premise is not an earlier step", no)
            if pivot <= 0:
                raise ParseError("pivot must be a positive variable", no)
            resolvent = ((steps[left].clause - {pivot})
                         | (steps[right].clause - {-pivot}))
            steps.append(ResStep(clause=resolvent, left=left, right=right,
                                 pivot=pivot))
            continue
        raise ParseError(f"unknown step kind {parts[2]!r}", no)
    return ResolutionProof(tuple(steps))


# ---------------------------------------------------------------------------
# DOT export


def _dot_label(vid: int, vert: Vertex) -> str:
    if vert.is_sink:
        return f"{vid}: sink {vert.index}"
    lab = vert.label
    if isinstance(lab, Inequality):
        return f"{vid}: ineq"
    if isinstance(lab, Equality):
        return f"{vid}: eq"
    if isinstance(lab, Conjunction):
        return f"{vid}: conj/{lab.arity}"
    if isinstance(lab, BitConjunction):
        return f"{vid}: bitconj/{len(lab.conjunction)}"
    return f"{vid}: ?"


def export_dot(p: Protocol) -> str:
    out = ["digraph protocol {"]
    for vid, vert in enumerate(p.vertices):
        shape = ", shape=box" if vert.is_sink else ""
        out.append(f'  v{vid} [label="{_dot_label(vid, vert)}"{shape}];')
    for vid, kids in enumerate(p.children):
        for kid in kids:
            out.append(f"  v{vid} -> v{kid};")
    out.append("}")
    return "\n".join(out) + "\n"
