"""CNF-side tooling for the interpolation pipeline.

Literals are DIMACS-style signed integers over positive variable ids.
A clause is a frozenset of literals.  Variables are partitioned into
the shared block x (one variable per input coordinate, in order) and
two private extension blocks y and z; a pair of CNFs (phi over x, y
and psi over x, z) whose conjunction is unsatisfiable is the raw
material the proof compiler consumes.

The selection encoder builds such a pair from the zero and one sets of
a partial monotone function.  It is exact not for the given sets but
for their monotone closures: phi(a, .) is satisfiable precisely when a
lies below some zero, psi(b, .) precisely when b lies above some one.
The closures are what the compiled protocols are verified against.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .core import (
    BitString,
    InputError,
    KwError,
    PartialMonotoneFunction,
    check_monotone,
)

Clause = frozenset  # of signed ints


class BudgetError(KwError):
    """Raised when saturation exceeds its clause budget."""


def _check_clause(clause, nvars: int, where: str):
    for lit in clause:
        if not isinstance(lit, int) or isinstance(lit, bool) or lit == 0:
            raise InputError(f"{where}: bad literal {lit!r}")
        if abs(lit) > nvars:
            raise InputError(f"{where}: literal {lit} exceeds {nvars} variables")


@dataclass(frozen=True)
class Cnf:
    nvars: int
    clauses: tuple

    def __post_init__(self):
        if self.nvars < 0:
            raise InputError("variable count must be nonnegative")
        for pos, clause in enumerate(self.clauses):
            if not isinstance(clause, frozenset):
                raise InputError(f"clause {pos} is not a frozenset")
            _check_clause(clause, self.nvars, f"clause {pos}")

    @classmethod
    def from_clauses(cls, clauses: Iterable[Iterable[int]],
                     nvars: Optional[int] = None) -> "Cnf":
        frozen = tuple(frozenset(c) for c in clauses)
        if nvars is None:
            nvars = max((abs(l) for c in frozen for l in c), default=0)
        return cls(nvars, frozen)


@dataclass(frozen=True)
class VariablePartition:
    """Disjoint variable blocks; x is ordered, x[i-1] encodes coordinate i."""

    x: tuple
    y: frozenset
    z: frozenset

    def __post_init__(self):
        xs = set(self.x)
        if len(xs) != len(self.x):
            raise InputError("repeated x variable")
        for block, name in ((xs, "x"), (self.y, "y"), (self.z, "z")):
            for v in block:
                if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                    raise InputError(f"bad {name} variable {v!r}")
        if xs & self.y or xs & self.z or self.y & self.z:
            raise InputError("variable blocks overlap")

    def side(self, var: int) -> str:
        if var in self.y:
            return "y"
        if var in self.z:
            return "z"
        if var in self.x:
            return "x"
        raise InputError(f"variable {var} is not in the partition")

    def coordinate(self, var: int) -> int:
        """1-based input coordinate of an x variable."""
        try:
            return self.x.index(var) + 1
        except ValueError:
            raise InputError(f"variable {var} is not an x variable") from None


# ---------------------------------------------------------------------------
# clause splitting


def clause_split(clause: frozenset, x_vars, fresh_from: int):
    """Split one clause into a chain with at most one x-literal each.

    The x-literals, in ascending variable order, are spread over a
    chain linked by fresh extension variables: the first link keeps all
    non-x literals.  For every fixed assignment to x the chain is
    satisfiable over the extension variables exactly when the original
    clause is satisfied or some non-x literal can be.  Returns the
    clause list and the next unused variable id.
    """
    xs = set(x_vars)
    x_lits = sorted((l for l in clause if abs(l) in xs), key=lambda l: (abs(l), l < 0))
    rest = [l for l in clause if abs(l) not in xs]
    if len(x_lits) <= 1:
        return [clause], fresh_from
    out = []
    prev = None
    for t, lit in enumerate(x_lits):
        body = []
        if t == 0:
            body.extend(rest)
        else:
            body.append(-prev)
        body.append(lit)
        if t < len(x_lits) - 1:
            prev = fresh_from
            fresh_from += 1
            body.append(prev)
        out.append(frozenset(body))
    return out, fresh_from


# ---------------------------------------------------------------------------
# the selection encoder


@dataclass(frozen=True)
class InterpolantPair:
    """A pair of CNFs over a shared x block with private extensions.

    phi mentions only x and y variables, psi only x and z; their
    conjunction is unsatisfiable.  zeros and ones record the sets the
    pair was built from; the exact semantics is their closure.
    """

    n: int
    partition: VariablePartition
    phi: tuple
    psi: tuple
    nvars: int
    zeros: frozenset
    ones: frozenset

    def phi_cnf(self) -> Cnf:
        return Cnf(self.nvars, self.phi)

    def psi_cnf(self) -> Cnf:
        return Cnf(self.nvars, self.psi)

    def combined_cnf(self) -> Cnf:
        """phi then psi; clause indices below len(phi) are phi clauses."""
        return Cnf(self.nvars, self.phi + self.psi)

    def closure(self) -> PartialMonotoneFunction:
        """The function the pair encodes exactly: everything below a
        zero maps to 0, everything above a one maps to 1."""
        return closure_function(
            PartialMonotoneFunction(self.n, self.zeros, self.ones))


def _down_closure(strings, n: int):
    out = set()
    for s in strings:
        mask = s.to_int()
        sub = mask
        while True:
            out.add(BitString.from_int(sub, n))
            if sub == 0:
                break
            sub = (sub - 1) & mask
    return frozenset(out)


def _up_closure(strings, n: int):
    full = (1 << n) - 1
    flipped = _down_closure(
        (BitString.from_int(s.to_int() ^ full, n) for s in strings), n)
    return frozenset(BitString.from_int(s.to_int() ^ full, n) for s in flipped)


def closure_function(f: PartialMonotoneFunction) -> PartialMonotoneFunction:
    """Close the zero set downward and the one set upward.  The result
    is the largest partial function with the same monotone extensions;
    it is exactly what the selection encoding expresses."""
    bad = check_monotone(f)
    if bad is not None:
        x, y = bad
        raise InputError(f"not monotone-compatible: {y} <= {x} coordinatewise")
    return PartialMonotoneFunction(
        f.n, _down_closure(f.zeros, f.n), _up_closure(f.ones, f.n))


def selection_encode(f: PartialMonotoneFunction) -> InterpolantPair:
    """Encode a partial monotone function as an unsatisfiable pair.

    One selector variable per zero (y block) and per one (z block).
    phi says: some zero a is selected, and selecting it forces x_i = 0
    wherever a_i = 0.  psi symmetrically forces x_i = 1 wherever the
    selected one has a 1.  x occurs only negatively in phi and only
    positively in psi, one x-literal per clause.
    """
    bad = check_monotone(f)
    if bad is not None:
        x, y = bad
        raise InputError(f"not monotone-compatible: {y} <= {x} coordinatewise")
    n = f.n
    zeros = f.sorted_zeros()
    ones = f.sorted_ones()
    x_vars = tuple(range(1, n + 1))
    y_of = {a: n + 1 + i for i, a in enumerate(zeros)}
    z_of = {b: n + 1 + len(zeros) + i for i, b in enumerate(ones)}
    nvars = n + len(zeros) + len(ones)

    phi = [frozenset(y_of[a] for a in zeros)]
    for a in zeros:
        for i in range(1, n + 1):
            if a.bit(i) == 0:
                phi.append(frozenset((-y_of[a], -i)))
    psi = [frozenset(z_of[b] for b in ones)]
    for b in ones:
        for i in range(1, n + 1):
            if b.bit(i) == 1:
                psi.append(frozenset((-z_of[b], i)))

    part = VariablePartition(x_vars, frozenset(y_of.values()),
                             frozenset(z_of.values()))
    return InterpolantPair(n=n, partition=part, phi=tuple(phi), psi=tuple(psi),
                           nvars=nvars, zeros=f.zeros, ones=f.ones)


def split_interpolant(pair: InterpolantPair) -> InterpolantPair:
    """Apply clause splitting to both halves, giving at most one
    x-literal per clause.  Fresh chain variables extend the side they
    split (y for phi, z for psi)."""
    fresh = pair.nvars + 1
    new_y = set(pair.partition.y)
    phi = []
    for clause in pair.phi:
        pieces, nxt = clause_split(clause, pair.partition.x, fresh)
        new_y.update(range(fresh, nxt))
        fresh = nxt
        phi.extend(pieces)
    new_z = set(pair.partition.z)
    psi = []
    for clause in pair.psi:
        pieces, nxt = clause_split(clause, pair.partition.x, fresh)
        new_z.update(range(fresh, nxt))
        fresh = nxt
        psi.extend(pieces)
    part = VariablePartition(pair.partition.x, frozenset(new_y), frozenset(new_z))
    return InterpolantPair(n=pair.n, partition=part, phi=tuple(phi),
                           psi=tuple(psi), nvars=fresh - 1,
                           zeros=pair.zeros, ones=pair.ones)


# ---------------------------------------------------------------------------
# a miniature resolution engine


@dataclass(frozen=True)
class ResStep:
    """One line of a resolution proof: an input clause or a resolvent.

    For resolvents, pivot is the resolved variable; the left premise
    contains +pivot, the right premise -pivot.
    """

    clause: frozenset
    axiom: Optional[int] = None
    left: Optional[int] = None
    right: Optional[int] = None
    pivot: Optional[int] = None

    @property
    def is_axiom(self) -> bool:
        return self.axiom is not None


@dataclass(frozen=True)
class ResolutionProof:
    steps: tuple

    @property
    def final(self) -> frozenset:
        if not self.steps:
            raise InputError("empty proof")
        return self.steps[-1].clause


def check_resolution_proof(axioms: Sequence[frozenset], proof: ResolutionProof):
    """Validate every step against the resolution rule; the last line
    must be the empty clause.  Raises InputError naming the bad line."""
    for pos, step in enumerate(proof.steps):
        if step.is_axiom:
            if not 0 <= step.axiom < len(axioms):
                raise InputError(f"line {pos}: axiom index {step.axiom} out of range")
            if frozenset(axioms[step.axiom]) != step.clause:
                raise InputError(f"line {pos}: clause differs from axiom {step.axiom}")
            continue
        if step.left is None or step.right is None or step.pivot is None:
            raise InputError(f"line {pos}: resolvent missing premises or pivot")
        for ref in (step.left, step.right):
            if not 0 <= ref < pos:
                raise InputError(f"line {pos}: reference {ref} is not earlier")
        lc = proof.steps[step.left].clause
        rc = proof.steps[step.right].clause
        if step.pivot not in lc or -step.pivot not in rc:
            raise InputError(f"line {pos}: pivot {step.pivot} not split across premises")
        if (lc - {step.pivot}) | (rc - {-step.pivot}) != step.clause:
            raise InputError(f"line {pos}: clause is not the resolvent")
    if not proof.steps or proof.steps[-1].clause:
        raise InputError("proof does not end in the empty clause")


def _is_tautology(clause) -> bool:
    return any(-l in clause for l in clause)


def _lex_least_model(cnf: Cnf):
    assign = {}

    def conflict() -> bool:
        for clause in cnf.clauses:
            open_clause = False
            for lit in clause:
                v = assign.get(abs(lit))
                if v is None:
                    open_clause = True
                elif v == (1 if lit > 0 else 0):
                    break
            else:
                if not open_clause:
                    return True
        return False

    def rec(v: int) -> bool:
        if v > cnf.nvars:
            return not conflict()
        for val in (0, 1):
            assign[v] = val
            if not conflict() and rec(v + 1):
                return True
        del assign[v]
        return False

    if not rec(1):
        return None
    return dict(assign)


def saturation_refute(cnf: Cnf, budget: int = 50_000
                      ) -> Union[ResolutionProof, dict]:
    """Exhaustive resolution with subsumption.

    Returns a resolution refutation when the CNF is unsatisfiable,
    otherwise its lexicographically least model (variables in id order,
    false before true).  Deterministic; raises BudgetError when more
    than `budget` clauses would be kept.
    """
    clauses = []       # frozensets, in creation order
    origins = []       # ("axiom", input-idx) or ("res", left, right, pivot)
    alive = []
    seen = {}

    def subsumed(c) -> bool:
        return any(alive[i] and clauses[i] <= c for i in range(len(clauses)))

    def add(c, origin) -> Optional[int]:
        if _is_tautology(c) or c in seen or subsumed(c):
            return None
        if len(clauses) >= budget:
            raise BudgetError(f"clause budget {budget} exceeded")
        for i in range(len(clauses)):
            if alive[i] and c < clauses[i]:
                alive[i] = False
        seen[c] = len(clauses)
        clauses.append(c)
        origins.append(origin)
        alive.append(True)
        return seen[c]

    empty_id = None
    queue = deque()
    for idx, clause in enumerate(cnf.clauses):
        cid = add(frozenset(clause), ("axiom", idx))
        if cid is not None:
            queue.append(cid)
            if not clauses[cid]:
                empty_id = cid

    processed = []
    while queue and empty_id is None:
        g = queue.popleft()
        if not alive[g]:
            continue
        for p in list(processed):
            if not alive[p] or not alive[g]:
                continue
            for a, b in ((g, p), (p, g)):
                for lit in sorted(clauses[a]):
                    if lit > 0 and -lit in clauses[b]:
                        resolvent = (clauses[a] - {lit}) | (clauses[b] - {-lit})
                        cid = add(resolvent, ("res", a, b, lit))
                        if cid is None:
                            continue
                        queue.append(cid)
                        if not resolvent:
                            empty_id = cid
                            break
                if empty_id is not None:
                    break
            if empty_id is not None:
                break
        processed.append(g)

    if empty_id is None:
        model = _lex_least_model(cnf)
        if model is None:
            raise KwError("internal error: saturation closed but a model was not found")
        return model

    # Extract the derivation of the empty clause, ancestors first.
    order = []
    mark = {}

    def visit(cid: int):
        if cid in mark:
            return
        origin = origins[cid]
        if origin[0] == "res":
            visit(origin[1])
            visit(origin[2])
        mark[cid] = len(order)
        order.append(cid)

    visit(empty_id)
    steps = []
    for cid in order:
        origin = origins[cid]
        if origin[0] == "axiom":
            steps.append(ResStep(clause=clauses[cid], axiom=origin[1]))
        else:
            steps.append(ResStep(clause=clauses[cid], left=mark[origin[1]],
                                 right=mark[origin[2]], pivot=origin[3]))
    proof = ResolutionProof(tuple(steps))
    check_resolution_proof(cnf.clauses, proof)
    return proof
