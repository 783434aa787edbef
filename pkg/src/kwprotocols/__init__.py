"""Dag-like communication protocols for monotone Karchmer-Wigderson
games: construction, transformation, exhaustive verification,
simulation of conjunction protocols by degree-2 equality protocols,
and compilation of linear-clause refutations into such protocols.
"""

from .core import (
    BitConjunction,
    BitEqualityConjunction,
    BitString,
    BitTerm,
    Conjunction,
    DomainError,
    Equality,
    FeasibilityLabel,
    Inequality,
    InputError,
    KwError,
    PartialMonotoneFunction,
    Protocol,
    Report,
    ValueTable,
    Vertex,
    Violation,
    check_monotone,
    check_wellformed,
    encode_bit_conjunction,
    eval_label,
    eval_vertex,
    rank_normalize,
    sink_equality_conjunction,
    solution_indices,
)
from .verifier import StuckError, feasible_set, trace, verify_solves
from .constructions import chain_conjunction_protocol, wide_inequality_protocol
from .simulate import (
    Candidate,
    SizeAccounting,
    TreeNode,
    WitnessTuple,
    build_skeleton,
    build_tree,
    conjunction_params,
    decompose_inequality,
    degree_reduce_eq,
    encode_protocol_labels,
    eq_to_conj2,
    simulate_conj_to_eq,
    size_accounting,
    stage_size_exact,
    stage_tree,
    tree_size_exact,
    witness_label,
    witnesses,
)
from .formulas import (
    BudgetError,
    Cnf,
    InterpolantPair,
    ResStep,
    ResolutionProof,
    VariablePartition,
    check_resolution_proof,
    clause_split,
    closure_function,
    saturation_refute,
    selection_encode,
    split_interpolant,
)
from .reslin import (
    Addition,
    Axiom,
    CheckResult,
    CompileError,
    Contraction,
    LinearPolynomial,
    RlinClause,
    RlinLine,
    RlinRefutation,
    check_refutation,
    compile_interpolant,
    find_witnesses,
    resolution_to_rlin,
    split_polynomial,
    translate_cnf,
)

__version__ = "0.1.0"
