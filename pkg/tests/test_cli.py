"""End-to-end command tests through main(argv)."""

import random

import pytest

from kwprotocols.cli import main
from kwprotocols.core import PartialMonotoneFunction, rank_normalize
from kwprotocols.constructions import chain_conjunction_protocol
from kwprotocols.fileformats import (
    parse_protocol,
    serialize_function,
    serialize_protocol,
)
from kwprotocols.formulas import closure_function
from kwprotocols.verifier import verify_solves

from testutil import random_function


@pytest.fixture
def f3():
    return PartialMonotoneFunction.from_strings(
        3, ["010", "100"], ["011", "110"])


@pytest.fixture
def f3_file(tmp_path, f3):
    path = tmp_path / "f.txt"
    path.write_text(serialize_function(f3))
    return str(path)


class TestCheckFunction:
    def test_ok(self, f3_file, capsys):
        assert main(["check-function", f3_file]) == 0
        out = capsys.readouterr().out
        assert "ok: n=3" in out and "2 zeros" in out

    def test_incompatible(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("n=2\nzeros:\n11\nones:\n01\n")
        assert main(["check-function", str(path)]) == 1
        assert "not monotone-compatible" in capsys.readouterr().out

    def test_missing_file(self, capsys):
        assert main(["check-function", "does-not-exist.txt"]) == 1
        assert "cannot read" in capsys.readouterr().err


class TestVerify:
    def test_ok(self, tmp_path, f3, f3_file, capsys):
        proto = tmp_path / "p.txt"
        proto.write_text(serialize_protocol(chain_conjunction_protocol(f3)))
        assert main(["verify", str(proto), "--function", f3_file]) == 0
        assert "4 pairs checked" in capsys.readouterr().out

    def test_violations_reported(self, tmp_path, f3, f3_file, capsys):
        p = chain_conjunction_protocol(f3)
        text = serialize_protocol(p).replace("vertex 2 sink 1",
                                             "vertex 2 sink 2")
        proto = tmp_path / "p.txt"
        proto.write_text(text)
        assert main(["verify", str(proto), "--function", f3_file]) == 1
        assert "no-feasible-child" in capsys.readouterr().out

    def test_shape_defects_reported_first(self, tmp_path, f3_file, capsys):
        proto = tmp_path / "p.txt"
        proto.write_text("n=3\ndegree=1\nvertex 0 sink 1\nvertex 1 sink 2\n"
                         "edge 0 1\n")
        assert main(["verify", str(proto), "--function", f3_file]) == 1
        assert "sink-with-children" in capsys.readouterr().out

    def test_jobs_flag(self, tmp_path, f3, f3_file, capsys):
        proto = tmp_path / "p.txt"
        proto.write_text(serialize_protocol(chain_conjunction_protocol(f3)))
        assert main(["verify", str(proto), "--function", f3_file,
                     "--jobs", "3", "--strict-sinks"]) == 0


class TestBaselines:
    def test_fact1_and_fact2_verify(self, tmp_path, f3_file):
        for maker in ("make-fact1", "make-fact2"):
            out = tmp_path / f"{maker}.txt"
            assert main([maker, f3_file, "-o", str(out)]) == 0
            assert main(["verify", str(out), "--function", f3_file]) == 0

    def test_stdout_default(self, f3_file, capsys):
        assert main(["make-fact1", f3_file]) == 0
        text = capsys.readouterr().out
        assert text.startswith("n=3\ndegree=3\n")
        parse_protocol(text)


class TestSimulatePipeline:
    def test_normalize_then_simulate(self, tmp_path, f3, f3_file, capsys):
        chain = tmp_path / "chain.txt"
        norm = tmp_path / "norm.txt"
        sim = tmp_path / "sim.txt"
        assert main(["make-fact2", f3_file, "-o", str(chain)]) == 0
        assert main(["normalize", str(chain), "-o", str(norm)]) == 0
        assert "width=2" in capsys.readouterr().err
        assert main(["simulate", str(norm), "--function", f3_file,
                     "--check", "-o", str(sim)]) == 0
        assert main(["verify", str(sim), "--function", f3_file]) == 0
        p = parse_protocol(sim.read_text())
        assert p.degree == 2
        assert p.size == 16

    def test_unnormalized_input_fails_cleanly(self, tmp_path, f3, f3_file,
                                              capsys):
        chain = tmp_path / "chain.txt"
        assert main(["make-fact2", f3_file, "-o", str(chain)]) == 0
        assert main(["simulate", str(chain), "--function", f3_file]) == 1
        assert "rank normalize" in capsys.readouterr().err

    def test_no_encode_output_parses(self, tmp_path, f3, f3_file, capsys):
        # bit-level labels reference tables, which have no text form
        norm = tmp_path / "norm.txt"
        assert main(["make-fact2", f3_file, "-o", str(norm)]) == 0
        assert main(["normalize", str(norm), "-o", str(norm)]) == 0
        assert main(["simulate", str(norm), "--function", f3_file,
                     "--no-encode"]) == 1
        assert "encode the protocol" in capsys.readouterr().err


class TestDegreeReduction:
    def test_eq_to_conj2_then_reduce(self, tmp_path, f3, f3_file):
        # equality protocol: trivial source over the three sinks
        eq = tmp_path / "eq.txt"
        eq.write_text(
            "n=3\ndegree=3\n"
            "vertex 0 inner eq\n"
            "q 010 0\nq 100 0\nr 011 0\nr 110 0\n"
            "vertex 1 sink 1\nvertex 2 sink 2\nvertex 3 sink 3\n"
            "edge 0 1\nedge 0 2\nedge 0 3\n")
        conj = tmp_path / "conj.txt"
        assert main(["eq-to-conj2", str(eq), "-o", str(conj)]) == 0
        parsed = parse_protocol(conj.read_text())
        assert parsed.size == 4
        red = tmp_path / "red.txt"
        assert main(["reduce-degree", str(eq), "--function", f3_file,
                     "--check", "-o", str(red)]) == 0
        assert main(["verify", str(red), "--function", f3_file]) == 0
        assert parse_protocol(red.read_text()).degree == 2


class TestProofPipeline:
    def _closure_file(self, tmp_path, f):
        path = tmp_path / "closure.txt"
        path.write_text(serialize_function(closure_function(f)))
        return str(path)

    def test_formula_to_protocol(self, tmp_path, f3, f3_file, capsys):
        cnf = tmp_path / "formula.cnf"
        res = tmp_path / "proof.res"
        rlin = tmp_path / "proof.rlin"
        proto = tmp_path / "compiled.txt"
        assert main(["gen-formula", f3_file, "--split", "-o", str(cnf)]) == 0
        assert main(["res-refute", str(cnf), "-o", str(res)]) == 0
        assert main(["res-to-rlin", str(res), "--cnf", str(cnf),
                     "-o", str(rlin)]) == 0
        assert main(["rlin-check", str(rlin), "--cnf", str(cnf)]) == 0
        assert "ok" in capsys.readouterr().out
        assert main(["rlin-compile", str(rlin), "--cnf", str(cnf),
                     "--function", f3_file, "--closure",
                     "-o", str(proto)]) == 0
        closure = self._closure_file(tmp_path, f3)
        assert main(["verify", str(proto), "--function", closure]) == 0
        assert parse_protocol(proto.read_text()).degree == 2

    def test_res_refute_satisfiable(self, tmp_path, capsys):
        cnf = tmp_path / "sat.cnf"
        cnf.write_text("p cnf 2 2\n1 2 0\n-1 0\n")
        assert main(["res-refute", str(cnf)]) == 1
        out = capsys.readouterr().out
        assert out.startswith("satisfiable: ")
        assert "1=0" in out and "2=1" in out

    def test_res_refute_budget(self, tmp_path, f3_file, capsys):
        cnf = tmp_path / "formula.cnf"
        assert main(["gen-formula", f3_file, "-o", str(cnf)]) == 0
        assert main(["res-refute", str(cnf), "--budget", "2"]) == 1
        assert "budget" in capsys.readouterr().err

    def test_rlin_check_rejects_bad_proof(self, tmp_path, capsys):
        proof = tmp_path / "bad.rlin"
        proof.write_text("line 0 axiom {x1}\n")
        assert main(["rlin-check", str(proof)]) == 1
        assert "final line" in capsys.readouterr().out

    def test_rlin_check_cross_checks_cnf(self, tmp_path, capsys):
        cnf = tmp_path / "tiny.cnf"
        cnf.write_text("p cnf 1 2\n1 0\n-1 0\n")
        proof = tmp_path / "proof.rlin"
        proof.write_text("line 0 axiom {x1}\n"
                         "line 1 axiom {1+x1}\n"
                         "line 2 add 0 1 x1 1+x1\n"
                         "line 3 contract 2 0\n")
        assert main(["rlin-check", str(proof), "--cnf", str(cnf)]) == 0
        foreign = tmp_path / "foreign.rlin"
        foreign.write_text("line 0 axiom {x2}\n"
                           "line 1 axiom {1+x2}\n"
                           "line 2 add 0 1 x2 1+x2\n"
                           "line 3 contract 2 0\n")
        assert main(["rlin-check", str(foreign), "--cnf", str(cnf)]) == 1
        assert "does not come from" in capsys.readouterr().out

    def test_gen_formula_deterministic(self, tmp_path, f3_file, capsys):
        assert main(["gen-formula", f3_file, "--split"]) == 0
        first = capsys.readouterr().out
        assert main(["gen-formula", f3_file, "--split"]) == 0
        assert capsys.readouterr().out == first


class TestStats:
    def test_conjunction_bounds(self, tmp_path, f3, f3_file, capsys):
        norm = tmp_path / "norm.txt"
        assert main(["make-fact2", f3_file, "-o", str(norm)]) == 0
        assert main(["normalize", str(norm), "-o", str(norm)]) == 0
        assert main(["stats", str(norm), "--simulate",
                     "--function", f3_file]) == 0
        out = capsys.readouterr().out
        assert "size 5" in out
        assert "vertices[conjunction] 2" in out
        assert "exact bound" in out
        assert "exact bound     PASS" in out

    def test_histogram_only_for_equality_protocols(self, tmp_path, f3,
                                                   f3_file, capsys):
        norm = tmp_path / "norm.txt"
        sim = tmp_path / "sim.txt"
        assert main(["make-fact2", f3_file, "-o", str(norm)]) == 0
        assert main(["normalize", str(norm), "-o", str(norm)]) == 0
        assert main(["simulate", str(norm), "--function", f3_file,
                     "-o", str(sim)]) == 0
        assert main(["stats", str(sim)]) == 0
        out = capsys.readouterr().out
        assert "vertices[equality]" in out
        assert "exact bound" not in out

    def test_simulate_needs_function(self, tmp_path, f3_file, capsys):
        norm = tmp_path / "norm.txt"
        assert main(["make-fact2", f3_file, "-o", str(norm)]) == 0
        assert main(["normalize", str(norm), "-o", str(norm)]) == 0
        assert main(["stats", str(norm), "--simulate"]) == 1
        assert "--simulate needs --function" in capsys.readouterr().err


class TestExportDot:
    def test_output(self, tmp_path, f3, f3_file, capsys):
        proto = tmp_path / "p.txt"
        proto.write_text(serialize_protocol(chain_conjunction_protocol(f3)))
        assert main(["export-dot", str(proto)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("digraph protocol {")
        assert "shape=box" in out


class TestExitCodes:
    def test_parse_error_is_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("nonsense\n")
        assert main(["check-function", str(bad)]) == 2
        assert "parse error" in capsys.readouterr().err

    def test_usage_error_is_two(self, capsys):
        assert main(["no-such-command"]) == 2
        assert main(["verify"]) == 2
        capsys.readouterr()

    def test_parse_error_carries_line_number(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("n=2\nzeros:\n0x\n")
        assert main(["check-function", str(bad)]) == 2
        assert "line 3" in capsys.readouterr().err
