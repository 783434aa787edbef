"""Command-line front end.

Every command reads structured text files and writes to stdout or -o.
Exit status: 0 on success, 1 on a failed check or any domain error,
2 on usage or parse errors.  Outputs are canonical, so identical
invocations produce byte-identical results.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fileformats as ff
from .core import (
    InputError,
    KwError,
    check_monotone,
    check_wellformed,
    rank_normalize,
)
from .constructions import chain_conjunction_protocol, wide_inequality_protocol
from .formulas import (
    ResolutionProof,
    saturation_refute,
    selection_encode,
    split_interpolant,
    closure_function,
)
from .reslin import (
    Axiom,
    RlinLine,
    RlinRefutation,
    check_refutation,
    compile_interpolant,
    resolution_to_rlin,
    translate_cnf,
)
from .simulate import (
    conjunction_params,
    degree_reduce_eq,
    eq_to_conj2,
    simulate_conj_to_eq,
    size_accounting,
)
from .verifier import verify_solves


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_function(path: str):
    return ff.parse_function(_read(path))

def _load_protocol(path: str):
    return ff.parse_protocol(_read(path))


# -- commands


def _cmd_check_function(args) -> int:
    f = _load_function(args.function)
    bad = check_monotone(f)
    if bad is not None:
        x, y = bad
        print(f"not monotone-compatible: one {y} <= zero {x}")
        return 1
    print(f"ok: n={f.n}, {len(f.zeros)} zeros, {len(f.ones)} ones")
    return 0


def _cmd_verify(args) -> int:
    p = _load_protocol(args.protocol)
    f = _load_function(args.function)
    shape = check_wellformed(p)
    if not shape.ok:
        print(shape.render())
        return 1
    report = verify_solves(p, f, strict_sinks=args.strict_sinks, jobs=args.jobs)
    if not report.ok:
        print(report.render())
        return 1
    print(f"ok: {p.size} vertices, {len(f.zeros) * len(f.ones)} pairs checked")
    return 0


def _cmd_make_fact1(args) -> int:
    p = wide_inequality_protocol(_load_function(args.function))
    _emit(ff.serialize_protocol(p), args.out)
    return 0


def _cmd_make_fact2(args) -> int:
    p = chain_conjunction_protocol(_load_function(args.function))
    _emit(ff.serialize_protocol(p), args.out)
    return 0


def _cmd_normalize(args) -> int:
    p, width = rank_normalize(_load_protocol(args.protocol))
    _emit(ff.serialize_protocol(p), args.out)
    print(f"width={width}", file=sys.stderr)
    return 0


def _cmd_simulate(args) -> int:
    p = _load_protocol(args.protocol)
    f = _load_function(args.function)
    out = simulate_conj_to_eq(p, f, width=args.width, check=args.check,
                              encode=not args.no_encode)
    _emit(ff.serialize_protocol(out), args.out)
    return 0


def _cmd_eq_to_conj2(args) -> int:
    _emit(ff.serialize_protocol(eq_to_conj2(_load_protocol(args.protocol))),
          args.out)
    return 0


def _cmd_reduce_degree(args) -> int:
    p = _load_protocol(args.protocol)
    f = _load_function(args.function)
    _emit(ff.serialize_protocol(degree_reduce_eq(p, f, check=args.check)),
          args.out)
    return 0


def _cmd_rlin_check(args) -> int:
    doc = ff.parse_rlin(_read(args.proof))
    axioms = list(doc.axioms)
    if args.cnf:
        translated = translate_cnf(ff.parse_cnf(_read(args.cnf)).cnf)
        for pos, ax in enumerate(axioms):
            if ax not in translated:
                print(f"axiom {pos} {ff.serialize_linear_clause(ax)} "
                      "does not come from the CNF")
                return 1
    result = check_refutation(axioms, doc.proof)
    print(result.render())
    return 0 if result.ok else 1


def _cmd_rlin_compile(args) -> int:
    doc = ff.parse_cnf(_read(args.cnf))
    if doc.partition is None:
        raise InputError("the CNF file carries no variable partition")
    phi, psi = doc.split()
    parsed = ff.parse_rlin(_read(args.proof))
    proof = _realign(parsed, translate_cnf(doc.cnf))
    f = _load_function(args.function)
    if args.closure:
        f = closure_function(f)
    p = compile_interpolant(phi, psi, proof, doc.partition, f)
    _emit(ff.serialize_protocol(p), args.out)
    return 0


def _cmd_gen_formula(args) -> int:
    pair = selection_encode(_load_function(args.function))
    if args.split:
        pair = split_interpolant(pair)
    doc = ff.CnfDocument(pair.combined_cnf(), pair.partition, len(pair.phi))
    _emit(ff.serialize_cnf(doc), args.out)
    return 0


def _cmd_res_refute(args) -> int:
    cnf = ff.parse_cnf(_read(args.cnf)).cnf
    outcome = saturation_refute(cnf, budget=args.budget)
    if isinstance(outcome, ResolutionProof):
        _emit(ff.serialize_resolution(outcome), args.out)
        return 0
    model = " ".join(f"{v}={outcome[v]}" for v in sorted(outcome))
    print(f"satisfiable: {model}")
    return 1


def _cmd_res_to_rlin(args) -> int:
    cnf = ff.parse_cnf(_read(args.cnf)).cnf
    proof = ff.parse_resolution(_read(args.proof), cnf)
    _emit(ff.serialize_rlin(resolution_to_rlin(cnf, proof)), args.out)
    return 0


def _cmd_stats(args) -> int:
    p = _load_protocol(args.protocol)
    kinds: dict = {}
    for vert in p.vertices:
        name = "sink" if vert.is_sink else type(vert.label).__name__.lower()
        kinds[name] = kinds.get(name, 0) + 1
    print(f"size {p.size}")
    print(f"degree {p.degree}")
    for name in sorted(kinds):
        print(f"vertices[{name}] {kinds[name]}")
    try:
        size, arity, counts, width = conjunction_params(p)
    except InputError:
        return 0
    acc = size_accounting(size, width, arity, p.degree, counts)
    print(acc.render())
    if args.simulate:
        if not args.function:
            raise InputError("--simulate needs --function")
        f = _load_function(args.function)
        out = simulate_conj_to_eq(p, f, width=width)
        ok_exact = out.size <= acc.exact_bound
        print(f"simulated size  {out.size}")
        print(f"exact bound     {'PASS' if ok_exact else 'FAIL'}")
        if acc.closed_form_valid:
            ok_closed = out.size <= acc.closed_form_bound
            print(f"closed form     {'PASS' if ok_closed else 'FAIL'}")
        if not ok_exact:
            return 1
    return 0


def _cmd_export_dot(args) -> int:
    _emit(ff.export_dot(_load_protocol(args.protocol)), args.out)
    return 0


def _realign(parsed: ff.RlinDocument, axioms) -> RlinRefutation:
    """Remap file-order axiom indices onto the translated CNF clause
    list, matching clauses by equality."""
    mapping = {}
    for pos, clause in enumerate(parsed.axioms):
        try:
            mapping[pos] = axioms.index(clause)
        except ValueError:
            raise InputError(
                f"axiom {ff.serialize_linear_clause(clause)} does not match "
                "any CNF clause") from None
    lines = []
    for line in parsed.proof.lines:
        if isinstance(line.rule, Axiom):
            lines.append(RlinLine(line.clause, Axiom(mapping[line.rule.source])))
        else:
            lines.append(line)
    return RlinRefutation(tuple(lines))


# -- wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kwp",
        description="dag-like communication protocols for monotone "
                    "Karchmer-Wigderson games")
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_text):
        s = sub.add_parser(name, help=help_text)
        s.set_defaults(fn=fn)
        return s

    s = cmd("check-function", _cmd_check_function,
            "parse a function file and check monotone compatibility")
    s.add_argument("function")

    s = cmd("verify", _cmd_verify, "exhaustively verify a protocol against a function")
    s.add_argument("protocol")
    s.add_argument("--function", required=True)
    s.add_argument("--strict-sinks", action="store_true",
                   help="also re-check sink relations over the full cube")
    s.add_argument("--jobs", type=int, default=1)

    s = cmd("make-fact1", _cmd_make_fact1,
            "degree-n inequality protocol of size n+1")
    s.add_argument("function")
    s.add_argument("-o", "--out")

    s = cmd("make-fact2", _cmd_make_fact2,
            "degree-2 conjunction chain of size 2n-1")
    s.add_argument("function")
    s.add_argument("-o", "--out")

    s = cmd("normalize", _cmd_normalize,
            "replace table values by their ranks (width on stderr)")
    s.add_argument("protocol")
    s.add_argument("-o", "--out")

    s = cmd("simulate", _cmd_simulate,
            "simulate a conjunction protocol by a degree-2 equality protocol")
    s.add_argument("protocol")
    s.add_argument("--function", required=True)
    s.add_argument("--width", type=int)
    s.add_argument("--check", action="store_true",
                   help="verify the input before and the output after")
    s.add_argument("--no-encode", action="store_true",
                   help="keep bit-level conjunction labels")
    s.add_argument("-o", "--out")

    s = cmd("eq-to-conj2", _cmd_eq_to_conj2,
            "rewrite equality labels as two-inequality conjunctions")
    s.add_argument("protocol")
    s.add_argument("-o", "--out")

    s = cmd("reduce-degree", _cmd_reduce_degree,
            "any-degree equality protocol to a degree-2 equality protocol")
    s.add_argument("protocol")
    s.add_argument("--function", required=True)
    s.add_argument("--check", action="store_true")
    s.add_argument("-o", "--out")

    s = cmd("rlin-check", _cmd_rlin_check, "check a linear-clause refutation")
    s.add_argument("proof")
    s.add_argument("--cnf", help="also match axiom clauses against this CNF")

    s = cmd("rlin-compile", _cmd_rlin_compile,
            "compile a refutation of a partitioned CNF into a protocol")
    s.add_argument("proof")
    s.add_argument("--cnf", required=True)
    s.add_argument("--function", required=True)
    s.add_argument("--closure", action="store_true",
                   help="target the closure of the function's sets")
    s.add_argument("-o", "--out")

    s = cmd("gen-formula", _cmd_gen_formula,
            "encode a function as an unsatisfiable partitioned CNF")
    s.add_argument("function")
    s.add_argument("--split", action="store_true",
                   help="apply clause splitting to the result")
    s.add_argument("-o", "--out")

    s = cmd("res-refute", _cmd_res_refute,
            "saturate a CNF; refutation on success, model on exit 1")
    s.add_argument("cnf")
    s.add_argument("--budget", type=int, default=50_000)
    s.add_argument("-o", "--out")

    s = cmd("res-to-rlin", _cmd_res_to_rlin,
            "translate a resolution refutation to linear clauses")
    s.add_argument("proof")
    s.add_argument("--cnf", required=True)
    s.add_argument("-o", "--out")

    s = cmd("stats", _cmd_stats, "sizes, label histogram, and bound comparison")
    s.add_argument("protocol")
    s.add_argument("--simulate", action="store_true",
                   help="run the simulation and compare against the bounds")
    s.add_argument("--function")

    s = cmd("export-dot", _cmd_export_dot, "protocol structure as a DOT graph")
    s.add_argument("protocol")
    s.add_argument("-o", "--out")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.fn(args)
    except ff.ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except KwError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def run():
    sys.exit(main(sys.argv[1:]))
