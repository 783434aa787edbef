"""Text formats: byte-stable round trips and located parse errors."""

import random
from fractions import Fraction

import pytest

from kwprotocols.core import (
    BitConjunction,
    BitString,
    BitTerm,
    BitEqualityConjunction,
    Equality,
    InputError,
    PartialMonotoneFunction,
    Protocol,
    ValueTable,
    Vertex,
    rank_normalize,
    sink_equality_conjunction,
)
from kwprotocols.constructions import (
    chain_conjunction_protocol,
    wide_inequality_protocol,
)
from kwprotocols.fileformats import (
    CnfDocument,
    ParseError,
    export_dot,
    parse_cnf,
    parse_function,
    parse_linear_clause,
    parse_polynomial,
    parse_protocol,
    parse_resolution,
    parse_rlin,
    parse_value,
    serialize_cnf,
    serialize_function,
    serialize_linear_clause,
    serialize_polynomial,
    serialize_protocol,
    serialize_resolution,
    serialize_rlin,
    serialize_value,
)
from kwprotocols.formulas import Cnf, saturation_refute, selection_encode
from kwprotocols.reslin import (
    Axiom,
    LinearPolynomial,
    RlinClause,
    check_refutation,
    resolution_to_rlin,
    translate_cnf,
)
from kwprotocols.simulate import simulate_conj_to_eq
from kwprotocols.verifier import verify_solves

from testutil import random_equality_protocol, random_function

P = LinearPolynomial


class TestValues:
    def test_roundtrip(self):
        for v in (0, 7, -12, 10 ** 30, Fraction(3, 7), Fraction(-1, 2),
                  BitString.parse("0101"), BitString(()), BitString.parse("1")):
            token = serialize_value(v)
            assert parse_value(token, 1) == v

    def test_empty_bitstring_form(self):
        assert serialize_value(BitString(())) == "0:"

    def test_bool_rejected(self):
        with pytest.raises(InputError):
            serialize_value(True)

    def test_parse_errors(self):
        with pytest.raises(ParseError, match="hex"):
            parse_value("4:zz", 3)
        with pytest.raises(ParseError, match="fit"):
            parse_value("2:f", 3)
        with pytest.raises(ParseError, match="width"):
            parse_value("-1:0", 3)


class TestFunctionFormat:
    def test_roundtrip(self):
        f = PartialMonotoneFunction.from_strings(
            3, ["010", "100"], ["011", "110"])
        text = serialize_function(f)
        assert parse_function(text) == f
        assert serialize_function(parse_function(text)) == text

    def test_error_locations(self):
        with pytest.raises(ParseError) as exc:
            parse_function("n=2\nzeros:\n00\nn=2\n")
        assert exc.value.line == 4
        with pytest.raises(ParseError, match="missing n="):
            parse_function("zeros:\n")
        with pytest.raises(ParseError, match="before headers"):
            parse_function("zeros:\n00\n")

    def test_overlap_becomes_parse_error(self):
        with pytest.raises(ParseError, match="overlap"):
            parse_function("n=1\nzeros:\n0\nones:\n0\n")


def _bitconj_protocol():
    conj = BitEqualityConjunction((
        (BitTerm.input_bit("x", 1), BitTerm.constant(0)),
        (BitTerm.constant(1), BitTerm.input_bit("y", 2, negated=True)),
    ))
    verts = (Vertex(label=BitConjunction(conj)),
             Vertex(label=BitConjunction(sink_equality_conjunction(1))),
             Vertex(index=2))
    return Protocol(2, 1, verts, ((1,), (2,), ()))


class TestProtocolFormat:
    def _assert_roundtrip(self, p):
        text = serialize_protocol(p)
        back = parse_protocol(text)
        assert back == p
        assert serialize_protocol(back) == text

    def test_inequality_roundtrip(self):
        f = random_function(random.Random(3), 4)
        self._assert_roundtrip(wide_inequality_protocol(f))

    def test_conjunction_roundtrip(self):
        f = random_function(random.Random(5), 5)
        self._assert_roundtrip(chain_conjunction_protocol(f))

    def test_equality_roundtrip(self):
        rng = random.Random(7)
        f = random_function(rng, 3)
        self._assert_roundtrip(random_equality_protocol(rng, f))

    def test_simulated_output_roundtrip(self):
        f = random_function(random.Random(11), 3)
        norm, w = rank_normalize(chain_conjunction_protocol(f))
        self._assert_roundtrip(simulate_conj_to_eq(norm, f, width=w))

    def test_fraction_values_roundtrip(self):
        x0 = BitString.parse("0")
        y0 = BitString.parse("1")
        q = ValueTable("x", {x0: Fraction(1, 3)})
        r = ValueTable("y", {y0: Fraction(-2, 5)})
        p = Protocol(1, 1, (Vertex(label=Equality(q, r)), Vertex(index=1)),
                     ((1,), ()))
        self._assert_roundtrip(p)

    def test_bit_conjunction_roundtrip(self):
        self._assert_roundtrip(_bitconj_protocol())

    def test_table_backed_terms_are_not_serializable(self):
        f = random_function(random.Random(13), 3)
        norm, w = rank_normalize(chain_conjunction_protocol(f))
        raw = simulate_conj_to_eq(norm, f, width=w, encode=False)
        with pytest.raises(InputError, match="encode the protocol"):
            serialize_protocol(raw)

    def test_child_order_is_preserved(self):
        f = PartialMonotoneFunction.from_strings(3, ["010"], ["011"])
        p = wide_inequality_protocol(f)
        text = serialize_protocol(p)
        swapped = text.replace("edge 0 1\nedge 0 2", "edge 0 2\nedge 0 1")
        back = parse_protocol(swapped)
        assert back.children[0] == (2, 1, 3)

    def test_error_locations(self):
        with pytest.raises(ParseError) as exc:
            parse_protocol("n=1\ndegree=1\nvertex 0 sink 1\nvertex 0 sink 1\n")
        assert exc.value.line == 4
        with pytest.raises(ParseError, match="dense"):
            parse_protocol("n=1\ndegree=1\nvertex 1 sink 1\n")
        with pytest.raises(ParseError, match="role"):
            parse_protocol("n=1\ndegree=1\nvertex 0 hub 1\n")
        with pytest.raises(ParseError, match="outside"):
            parse_protocol("n=1\ndegree=1\nq 0 0\n")
        with pytest.raises(ParseError, match="missing"):
            parse_protocol("n=1\n")

    def test_repeated_table_key(self):
        text = ("n=1\ndegree=1\nvertex 0 inner eq\nq 0 1\nq 0 2\n"
                "vertex 1 sink 1\nedge 0 1\n")
        with pytest.raises(ParseError, match="repeated key"):
            parse_protocol(text)

    def test_edge_from_unknown_vertex(self):
        text = "n=1\ndegree=1\nvertex 0 sink 1\nedge 5 0\n"
        with pytest.raises(ParseError, match="unknown vertex 5"):
            parse_protocol(text)

    def test_dangling_edge_parses_but_is_not_wellformed(self):
        # defects that the shape allows are left to the wellformedness
        # report, so broken files stay inspectable
        from kwprotocols.core import check_wellformed
        back = parse_protocol("n=1\ndegree=1\nvertex 0 sink 1\nedge 0 5\n")
        report = check_wellformed(back)
        assert "edge-range" in {v.condition for v in report.violations}


class TestCnfFormat:
    def test_roundtrip_with_blocks(self):
        f = random_function(random.Random(17), 3)
        pair = selection_encode(f)
        doc = CnfDocument(pair.combined_cnf(), pair.partition, len(pair.phi))
        text = serialize_cnf(doc)
        back = parse_cnf(text)
        assert back == doc
        assert serialize_cnf(back) == text
        phi, psi = back.split()
        assert phi == pair.phi
        assert psi == pair.psi

    def test_bare_roundtrip(self):
        doc = CnfDocument(Cnf.from_clauses([(1, -2), (2,)]))
        text = serialize_cnf(doc)
        assert parse_cnf(text) == doc

    def test_split_requires_marker(self):
        doc = parse_cnf("p cnf 1 1\n1 0\n")
        with pytest.raises(InputError, match="phi marker"):
            doc.split()

    def test_parse_errors(self):
        with pytest.raises(ParseError, match="problem line"):
            parse_cnf("1 0\n")
        with pytest.raises(ParseError, match="end with 0"):
            parse_cnf("p cnf 1 1\n1\n")
        with pytest.raises(ParseError, match="expected 2 clauses"):
            parse_cnf("p cnf 1 2\n1 0\n")
        with pytest.raises(ParseError, match="bad problem line"):
            parse_cnf("p cnf 1\n")
        with pytest.raises(ParseError, match="out of range"):
            parse_cnf("c phi 4\np cnf 1 1\n1 0\n")


class TestPolynomialFormat:
    def test_constant_leads(self):
        assert serialize_polynomial(P(frozenset((5, 3)), 1)) == "1+x3+x5"
        assert serialize_polynomial(P.zero()) == "0"
        assert serialize_polynomial(P.one()) == "1"

    def test_roundtrip(self):
        for poly in (P.zero(), P.one(), P.var(2), P.from_literal(-9),
                     P(frozenset((1, 4, 30)), 1)):
            assert parse_polynomial(serialize_polynomial(poly), 1) == poly

    def test_parse_errors(self):
        with pytest.raises(ParseError, match="repeated constant"):
            parse_polynomial("1+1", 2)
        with pytest.raises(ParseError, match="repeated variable"):
            parse_polynomial("x3+x3", 2)
        with pytest.raises(ParseError, match="0 inside"):
            parse_polynomial("0+x1", 2)
        with pytest.raises(ParseError, match="bad polynomial term"):
            parse_polynomial("y2", 2)

    def test_clause_roundtrip(self):
        clause = RlinClause.of((P.var(1), P.one() + P.var(2), P.zero()))
        text = serialize_linear_clause(clause)
        assert parse_linear_clause(text, 1) == clause
        assert parse_linear_clause("{}", 1) == RlinClause(frozenset())
        with pytest.raises(ParseError, match="braced"):
            parse_linear_clause("x1", 1)


class TestRlinFormat:
    def test_roundtrip_recomputes_derived_clauses(self):
        # axiom indices are renumbered by order of appearance, so the
        # stable content is the clause of every line plus the text form
        f = random_function(random.Random(19), 3)
        pair = selection_encode(f)
        cnf = pair.combined_cnf()
        proof = resolution_to_rlin(cnf, saturation_refute(cnf))
        text = serialize_rlin(proof)
        doc = parse_rlin(text)
        assert len(doc.proof) == len(proof)
        for mine, parsed in zip(proof.lines, doc.proof.lines):
            assert parsed.clause == mine.clause
            if not isinstance(mine.rule, Axiom):
                assert parsed.rule == mine.rule
        assert serialize_rlin(doc.proof) == text
        assert check_refutation(doc.axioms, doc.proof).ok

    def test_axioms_collected_in_order(self):
        text = ("line 0 axiom {x1}\n"
                "line 1 axiom {1+x1}\n"
                "line 2 add 0 1 x1 1+x1\n"
                "line 3 contract 2 0\n")
        doc = parse_rlin(text)
        assert doc.axioms == (RlinClause.of((P.var(1),)),
                              RlinClause.of((P.one() + P.var(1),)))
        assert check_refutation(doc.axioms, doc.proof).ok

    def test_semantic_errors_left_to_checker(self):
        # contracting an absent polynomial parses fine but fails checking
        text = ("line 0 axiom {x1}\n"
                "line 1 contract 0 x2\n")
        doc = parse_rlin(text)
        result = check_refutation(doc.axioms, doc.proof)
        assert not result.ok

    def test_parse_errors(self):
        with pytest.raises(ParseError, match="sequential"):
            parse_rlin("line 1 axiom {x1}\n")
        with pytest.raises(ParseError, match="unknown rule"):
            parse_rlin("line 0 multiply 1 2\n")
        with pytest.raises(ParseError, match="not an earlier line"):
            parse_rlin("line 0 add 0 0 x1 x1\n")
        with pytest.raises(ParseError, match="expected a line record"):
            parse_rlin("step 0 axiom {x1}\n")


class TestResolutionFormat:
    def test_roundtrip(self):
        cnf = Cnf.from_clauses([(1,), (-1,)])
        proof = saturation_refute(cnf)
        text = serialize_resolution(proof)
        back = parse_resolution(text, cnf)
        assert back == proof
        assert serialize_resolution(back) == text

    def test_parse_errors(self):
        cnf = Cnf.from_clauses([(1,), (-1,)])
        with pytest.raises(ParseError, match="out of range"):
            parse_resolution("step 0 axiom 9\n", cnf)
        with pytest.raises(ParseError, match="sequential"):
            parse_resolution("step 2 axiom 0\n", cnf)
        with pytest.raises(ParseError, match="pivot"):
            parse_resolution(
                "step 0 axiom 0\nstep 1 axiom 1\nstep 2 resolve 0 1 -1\n", cnf)
        with pytest.raises(ParseError, match="earlier"):
            parse_resolution("step 0 resolve 0 0 1\n", cnf)


class TestDot:
    def test_export_shape(self):
        f = PartialMonotoneFunction.from_strings(3, ["010"], ["011"])
        p = wide_inequality_protocol(f)
        dot = export_dot(p)
        assert dot.startswith("digraph protocol {")
        assert dot.endswith("}\n")
        assert 'v0 [label="0: ineq"];' in dot
        assert 'v1 [label="1: sink 1", shape=box];' in dot
        assert "v0 -> v3;" in dot
        assert export_dot(p) == dot

    def test_label_kinds(self):
        rng = random.Random(23)
        f = random_function(rng, 3)
        assert "conj/1" in export_dot(chain_conjunction_protocol(f))
        assert ": eq" in export_dot(random_equality_protocol(rng, f))
        assert "bitconj/2" in export_dot(_bitconj_protocol())
