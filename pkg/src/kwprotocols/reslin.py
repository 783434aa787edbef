"""Refutations over clauses of GF(2) linear polynomials, and the
compiler turning such a refutation of an unsatisfiable pair
phi(x, y) and psi(x, z) into a degree-2 equality protocol.

A clause is a set of linear polynomials, read as "some polynomial
evaluates to 1".  Three rules: axioms, contraction (dropping a
syntactic zero polynomial), and addition (from C u {g} and D u {h}
derive C u D u {g+h+1}).  Boolean axioms and weakening are not needed
and not implemented.

The compiler reverses the proof DAG of a refutation.  A line is
feasible for a pair (a, b) when its clause is falsified under the
joint assignment (a, witness y_a, witness z_b); every rule application
then hands falsity down to a premise, and the surviving axioms pin
down a solution coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .core import (
    BitString,
    Equality,
    InputError,
    KwError,
    PartialMonotoneFunction,
    Protocol,
    ValueTable,
    Vertex,
)
from .formulas import (
    Cnf,
    ResolutionProof,
    VariablePartition,
    check_resolution_proof,
)


class CompileError(KwError):
    """Raised when a refutation cannot be compiled into a protocol."""


# ---------------------------------------------------------------------------
# polynomials and clauses


@dataclass(frozen=True)
class LinearPolynomial:
    """constant + sum of variables over GF(2)."""

    variables: frozenset
    constant: int

    def __post_init__(self):
        if self.constant not in (0, 1):
            raise InputError(f"constant must be 0 or 1, got {self.constant!r}")
        for v in self.variables:
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise InputError(f"bad variable id {v!r}")

    @classmethod
    def zero(cls) -> "LinearPolynomial":
        return cls(frozenset(), 0)

    @classmethod
    def one(cls) -> "LinearPolynomial":
        return cls(frozenset(), 1)

    @classmethod
    def var(cls, v: int) -> "LinearPolynomial":
        return cls(frozenset((v,)), 0)

    @classmethod
    def from_literal(cls, lit: int) -> "LinearPolynomial":
        """x maps to the polynomial x, not-x to 1 + x; either way the
        polynomial evaluates to 1 exactly when the literal is true."""
        if lit == 0:
            raise InputError("literal 0")
        return cls(frozenset((abs(lit),)), 1 if lit < 0 else 0)

    def __add__(self, other: "LinearPolynomial") -> "LinearPolynomial":
        return LinearPolynomial(self.variables ^ other.variables,
                                self.constant ^ other.constant)

    @property
    def is_zero(self) -> bool:
        return not self.variables and self.constant == 0

    def evaluate(self, assignment: Mapping) -> int:
        total = self.constant
        for v in self.variables:
            try:
                total ^= assignment[v] & 1
            except KeyError:
                raise InputError(f"no value for variable {v}") from None
        return total

    def __str__(self) -> str:
        parts = [f"x{v}" for v in sorted(self.variables)]
        if self.constant:
            parts.append("1")
        return "+".join(parts) if parts else "0"


def polynomial_sort_key(p: LinearPolynomial):
    return (tuple(sorted(p.variables)), p.constant)


@dataclass(frozen=True)
class RlinClause:
    polys: frozenset

    @classmethod
    def of(cls, polys: Iterable[LinearPolynomial]) -> "RlinClause":
        return cls(frozenset(polys))

    @property
    def is_empty(self) -> bool:
        return not self.polys

    def sorted_polys(self):
        return sorted(self.polys, key=polynomial_sort_key)

    def __str__(self) -> str:
        if self.is_empty:
            return "{}"
        return "{" + ", ".join(str(p) for p in self.sorted_polys()) + "}"


def translate_cnf(cnf: Union[Cnf, Iterable]) -> list:
    """Clause-by-clause translation: each literal becomes the linear
    polynomial that is 1 exactly when the literal is true."""
    clauses = cnf.clauses if isinstance(cnf, Cnf) else tuple(cnf)
    return [RlinClause.of(LinearPolynomial.from_literal(l) for l in c)
            for c in clauses]


# ---------------------------------------------------------------------------
# refutations


@dataclass(frozen=True)
class Axiom:
    source: int


@dataclass(frozen=True)
class Contraction:
    line: int
    removed: LinearPolynomial


@dataclass(frozen=True)
class Addition:
    left: int
    right: int
    g: LinearPolynomial
    h: LinearPolynomial


Rule = Union[Axiom, Contraction, Addition]


@dataclass(frozen=True)
class RlinLine:
    clause: RlinClause
    rule: Rule


@dataclass(frozen=True)
class RlinRefutation:
    lines: tuple

    def __len__(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    line: Optional[int] = None
    reason: Optional[str] = None

    def render(self) -> str:
        if self.ok:
            return "ok"
        if self.line is None:
            return f"invalid: {self.reason}"
        return f"invalid at line {self.line}: {self.reason}"


def check_refutation(axioms: Sequence[RlinClause], proof: RlinRefutation
                     ) -> CheckResult:
    """Validate a refutation line by line against the three rules; the
    final line must be the empty clause."""

    def fail(pos, reason):
        return CheckResult(False, pos, reason)

    for pos, line in enumerate(proof.lines):
        rule = line.rule
        if isinstance(rule, Axiom):
            if not 0 <= rule.source < len(axioms):
                return fail(pos, f"axiom index {rule.source} out of range")
            if axioms[rule.source] != line.clause:
                return fail(pos, f"clause differs from axiom {rule.source}")
        elif isinstance(rule, Contraction):
            if not 0 <= rule.line < pos:
                return fail(pos, f"premise {rule.line} is not earlier")
            if not rule.removed.is_zero:
                return fail(pos, "contraction must remove the zero polynomial")
            premise = proof.lines[rule.line].clause
            if rule.removed not in premise.polys:
                return fail(pos, "premise does not contain the zero polynomial")
            if RlinClause(premise.polys - {rule.removed}) != line.clause:
                return fail(pos, "clause is not the contracted premise")
        elif isinstance(rule, Addition):
            for ref in (rule.left, rule.right):
                if not 0 <= ref < pos:
                    return fail(pos, f"premise {ref} is not earlier")
            lc = proof.lines[rule.left].clause
            rc = proof.lines[rule.right].clause
            if rule.g not in lc.polys:
                return fail(pos, f"left premise does not contain {rule.g}")
            if rule.h not in rc.polys:
                return fail(pos, f"right premise does not contain {rule.h}")
            derived = ((lc.polys - {rule.g}) | (rc.polys - {rule.h})
                       | {rule.g + rule.h + LinearPolynomial.one()})
            if RlinClause(derived) != line.clause:
                return fail(pos, "clause is not the addition result")
        else:
            return fail(pos, f"unknown rule {rule!r}")
    if not proof.lines:
        return CheckResult(False, None, "empty proof")
    if not proof.lines[-1].clause.is_empty:
        return CheckResult(False, len(proof.lines) - 1,
                           "final line is not the empty clause")
    return CheckResult(True)


def resolution_to_rlin(cnf: Cnf, proof: ResolutionProof) -> RlinRefutation:
    """Translate a resolution refutation: resolving on v is addition
    with g = v and h = 1 + v (their sum plus one is the zero
    polynomial) followed by a contraction removing that zero."""
    check_resolution_proof(cnf.clauses, proof)
    axioms = translate_cnf(cnf)
    lines = []
    line_of = {}
    for pos, step in enumerate(proof.steps):
        if step.is_axiom:
            line_of[pos] = len(lines)
            lines.append(RlinLine(axioms[step.axiom], Axiom(step.axiom)))
            continue
        g = LinearPolynomial.var(step.pivot)
        h = LinearPolynomial.one() + g
        lc = lines[line_of[step.left]].clause
        rc = lines[line_of[step.right]].clause
        zero = LinearPolynomial.zero()
        summed = RlinClause((lc.polys - {g}) | (rc.polys - {h}) | {zero})
        lines.append(RlinLine(summed, Addition(line_of[step.left],
                                               line_of[step.right], g, h)))
        line_of[pos] = len(lines)
        lines.append(RlinLine(RlinClause(summed.polys - {zero}),
                              Contraction(len(lines) - 1, zero)))
    return RlinRefutation(tuple(lines))


# ---------------------------------------------------------------------------
# splitting and witnesses


def split_polynomial(p: LinearPolynomial, partition: VariablePartition):
    """Split into the x/y part (keeping the constant) and the z part;
    the two halves sum back to p over GF(2)."""
    xy = set()
    z = set()
    for v in p.variables:
        side = partition.side(v)
        if side == "z":
            z.add(v)
        else:
            xy.add(v)
    return (LinearPolynomial(frozenset(xy), p.constant),
            LinearPolynomial(frozenset(z), 0))


def _lex_least_over(clauses, variables):
    """Lexicographically least satisfying assignment over the given
    variable order (false before true), or None."""
    order = list(variables)
    assign = {}

    def conflict() -> bool:
        for clause in clauses:
            undecided = False
            for lit in clause:
                v = assign.get(abs(lit))
                if v is None:
                    undecided = True
                elif v == (1 if lit > 0 else 0):
                    break
            else:
                if not undecided:
                    return True
        return False

    def rec(i: int) -> bool:
        if i == len(order):
            return not conflict()
        for val in (0, 1):
            assign[order[i]] = val
            if not conflict() and rec(i + 1):
                return True
        del assign[order[i]]
        return False

    if not rec(0):
        return None
    return dict(assign)


def find_witnesses(clauses: Sequence, partition: VariablePartition,
                   elements: Iterable[BitString], side: str) -> dict:
    """One satisfying extension per domain element for one half of the
    pair: the x block is fixed to the element's bits and the private
    block (y for phi, z for psi) is solved for.  Deterministic: the
    lexicographically least assignment over ascending variable ids.
    Raises InputError naming the element when none exists.
    """
    if side not in ("y", "z"):
        raise InputError(f"side must be 'y' or 'z', got {side!r}")
    block = sorted(partition.y if side == "y" else partition.z)
    n = len(partition.x)
    out = {}
    for element in sorted(elements, key=lambda s: s.bits):
        if len(element) != n:
            raise InputError(f"{element} does not have {n} bits")
        fixed = {partition.x[i - 1]: element.bit(i) for i in range(1, n + 1)}
        reduced = []
        ok = True
        for clause in clauses:
            keep = []
            satisfied = False
            for lit in clause:
                var = abs(lit)
                if var in fixed:
                    if fixed[var] == (1 if lit > 0 else 0):
                        satisfied = True
                        break
                elif partition.side(var) != side:
                    raise InputError(
                        f"variable {var} is not an x or {side} variable")
                else:
                    keep.append(lit)
            if satisfied:
                continue
            if not keep:
                ok = False
                break
            reduced.append(keep)
        model = _lex_least_over(reduced, block) if ok else None
        if model is None:
            raise InputError(f"no witness for {element}: restriction unsatisfiable")
        out[element] = {v: model.get(v, 0) for v in block}
    return out


# ---------------------------------------------------------------------------
# the compiler


def _rule_premises(rule: Rule):
    if isinstance(rule, Axiom):
        return ()
    if isinstance(rule, Contraction):
        return (rule.line,)
    return (rule.left, rule.right)


def compile_interpolant(phi_axioms: Sequence, psi_axioms: Sequence,
                        proof: RlinRefutation, partition: VariablePartition,
                        f: PartialMonotoneFunction) -> Protocol:
    """Compile a refutation of phi(x, y) and psi(x, z) into a degree-2
    equality protocol solving f.

    The proof must refute the translated concatenation of the two
    clause lists (axiom indices below len(phi_axioms) are phi clauses).
    Lines whose derivation uses no psi axiom are deleted, as are psi
    axioms without an x variable and anything thereby orphaned or left
    childless; surviving axioms become sinks on their unique positive x
    variable, surviving inner lines get equality labels evaluating
    their clause under the fixed witnesses.
    """
    phi_axioms = [frozenset(c) for c in phi_axioms]
    psi_axioms = [frozenset(c) for c in psi_axioms]
    axioms = translate_cnf(phi_axioms + psi_axioms)
    result = check_refutation(axioms, proof)
    if not result.ok:
        raise CompileError("proof does not check: " + result.render())
    if len(partition.x) != f.n:
        raise CompileError(
            f"partition has {len(partition.x)} x variables but f has n={f.n}")

    y_witness = find_witnesses(phi_axioms, partition, f.sorted_zeros(), "y")
    z_witness = find_witnesses(psi_axioms, partition, f.sorted_ones(), "z")

    total = len(proof.lines)
    final = total - 1

    # Ancestry of the final line; anything outside never feeds it.
    needed = set()
    stack = [final]
    while stack:
        pos = stack.pop()
        if pos in needed:
            continue
        needed.add(pos)
        stack.extend(_rule_premises(proof.lines[pos].rule))

    # Lines whose contributing axioms are all phi clauses are never
    # falsified at a zero of f, hence never feasible.
    uses_psi = {}
    for pos in range(total):
        rule = proof.lines[pos].rule
        if isinstance(rule, Axiom):
            uses_psi[pos] = rule.source >= len(phi_axioms)
        else:
            uses_psi[pos] = any(uses_psi[q] for q in _rule_premises(rule))

    alive = {pos for pos in needed if uses_psi[pos]}

    # Psi axioms must carry exactly one x variable, positively.
    sink_index = {}
    for pos in sorted(alive):
        rule = proof.lines[pos].rule
        if not isinstance(rule, Axiom):
            continue
        clause = proof.lines[pos].clause
        x_vars = sorted({v for p in clause.polys for v in p.variables
                         if partition.side(v) == "x"})
        if len(x_vars) > 1:
            raise CompileError(
                f"line {pos}: psi axiom mentions x variables {x_vars}; "
                "clause-split the formula first")
        if not x_vars:
            alive.discard(pos)  # pure-z axiom, never feasible
            continue
        v = x_vars[0]
        if LinearPolynomial.var(v) not in clause.polys:
            raise CompileError(
                f"line {pos}: x variable {v} does not occur as a bare "
                "positive polynomial")
        sink_index[pos] = partition.coordinate(v)

    # Childless inner lines are never feasible; orphans are unreachable.
    while True:
        dropped = False
        for pos in sorted(alive):
            rule = proof.lines[pos].rule
            if isinstance(rule, Axiom):
                continue
            if not any(q in alive for q in _rule_premises(rule)):
                alive.discard(pos)
                dropped = True
        if final not in alive:
            raise CompileError(
                "nothing left to compile: the source line was deleted")
        reach = set()
        stack = [final]
        while stack:
            pos = stack.pop()
            if pos in reach:
                continue
            reach.add(pos)
            stack.extend(q for q in _rule_premises(proof.lines[pos].rule)
                         if q in alive)
        if reach != alive:
            alive = reach
            dropped = True
        if not dropped:
            break

    ids = {pos: i for i, pos in enumerate(sorted(alive))}
    vertices = []
    children = []
    for pos in sorted(alive):
        line = proof.lines[pos]
        if isinstance(line.rule, Axiom):
            vertices.append(Vertex(index=sink_index[pos]))
            children.append(())
            continue
        polys = line.clause.sorted_polys()
        split = [split_polynomial(p, partition) for p in polys]
        q_entries = {}
        for a in f.sorted_zeros():
            env = {partition.x[i - 1]: a.bit(i) for i in range(1, f.n + 1)}
            env.update(y_witness[a])
            q_entries[a] = BitString(tuple(p0.evaluate(env) for p0, _ in split))
        r_entries = {}
        for b in f.sorted_ones():
            r_entries[b] = BitString(tuple(p1.evaluate(z_witness[b])
                                           for _, p1 in split))
        vertices.append(Vertex(label=Equality(ValueTable("x", q_entries),
                                              ValueTable("y", r_entries))))
        children.append(tuple(ids[q] for q in _rule_premises(line.rule)
                              if q in alive))
    return Protocol(f.n, 2, tuple(vertices), tuple(children))
