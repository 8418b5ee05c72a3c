"""Weighted transition-rule formats: specs, induced models, and their checks.

The package parses rule specifications in two dialects (boolean ``desimone``
and ``weighted`` over the extended nonnegative rationals), validates them
against the rule-format conditions, builds the induced step and trace
semantics, and runs the analyses the format is there to guarantee: the
affineness naturality square, probabilistic mass preservation, almost-sure
termination estimation, and empirical congruence of bounded trace
equivalence.
"""

from .analysis import (
    HOLE,
    Context,
    CongruenceReport,
    CongruenceViolation,
    bisim_partition,
    congruence_test,
    counterexample_search,
    fingerprint_buckets,
    first_difference,
    generate_contexts,
    generate_pairs,
    observably_equiv_bounded,
    trace_equiv_bounded,
)
from .corpus import (
    LEAKY_DEFAULT_CUTOFF,
    SPEC_NAMES,
    leaky_spec_text,
    load_spec,
    spec_path,
    spec_text,
)
from .formalsum import (
    STOP,
    FormalSum,
    Obs,
    Pure,
    Step,
    belem_map,
    dist_b,
    dist_b0,
    dist_sigma,
    dist_sigma_star,
    fs_empty,
    fs_flatten,
    fs_leq,
    fs_map,
    fs_pair_join,
    fs_scale,
    fs_total,
    fs_unit,
    is_affine,
)
from .law import (
    NaturalityResult,
    NaturalityWitness,
    bar_rho_step,
    law_star,
    leg_args_first,
    leg_law_first,
    naturality_check,
    rho_apply,
)
from .opmodel import (
    ProbReport,
    check_probabilistic,
    model_cache,
    reachable,
    step,
    step_direct,
)
from .ordering import payload_key
from .rulespec import (
    Rule,
    RuleSchema,
    RuleSpec,
    SpecParseError,
    TermPremise,
    TransPremise,
    Violation,
    expand_forall,
    format_errors,
    parse_spec,
    validate_format,
)
from .semiring import BOOLEAN, INF, RATIONAL, SEMIRINGS, Semiring, weight_key
from .terms import (
    Leaf,
    Node,
    Signature,
    TermSyntaxError,
    UnboundVariableError,
    Var,
    closed_terms_of_size,
    enumerate_closed_terms,
    graft,
    is_affine_term,
    is_closed,
    leaves,
    map_leaves,
    parse_term,
    print_term,
    substitute,
    term_key,
    term_size,
    term_vars,
)
from .trace import (
    AST_TOLERANCE,
    AstReport,
    ast_estimate,
    empty_table,
    partial_trace_bounded,
    total_mass,
    trace_bounded,
    trace_direct,
    trace_functional,
    word_to_str,
)

__version__ = "0.1.0"

__all__ = [
    "AST_TOLERANCE",
    "AstReport",
    "BOOLEAN",
    "Context",
    "CongruenceReport",
    "CongruenceViolation",
    "FormalSum",
    "HOLE",
    "INF",
    "LEAKY_DEFAULT_CUTOFF",
    "Leaf",
    "NaturalityResult",
    "NaturalityWitness",
    "Node",
    "Obs",
    "ProbReport",
    "Pure",
    "RATIONAL",
    "Rule",
    "RuleSchema",
    "RuleSpec",
    "SEMIRINGS",
    "SPEC_NAMES",
    "STOP",
    "Semiring",
    "Signature",
    "SpecParseError",
    "Step",
    "TermPremise",
    "TermSyntaxError",
    "TransPremise",
    "UnboundVariableError",
    "Var",
    "Violation",
    "ast_estimate",
    "bar_rho_step",
    "belem_map",
    "bisim_partition",
    "check_probabilistic",
    "closed_terms_of_size",
    "congruence_test",
    "counterexample_search",
    "dist_b",
    "dist_b0",
    "dist_sigma",
    "dist_sigma_star",
    "empty_table",
    "enumerate_closed_terms",
    "expand_forall",
    "fingerprint_buckets",
    "first_difference",
    "format_errors",
    "fs_empty",
    "fs_flatten",
    "fs_leq",
    "fs_map",
    "fs_pair_join",
    "fs_scale",
    "fs_total",
    "fs_unit",
    "generate_contexts",
    "generate_pairs",
    "graft",
    "is_affine",
    "is_affine_term",
    "is_closed",
    "law_star",
    "leaky_spec_text",
    "leaves",
    "leg_args_first",
    "leg_law_first",
    "load_spec",
    "map_leaves",
    "model_cache",
    "naturality_check",
    "observably_equiv_bounded",
    "parse_spec",
    "parse_term",
    "partial_trace_bounded",
    "payload_key",
    "print_term",
    "reachable",
    "rho_apply",
    "spec_path",
    "spec_text",
    "step",
    "step_direct",
    "substitute",
    "term_key",
    "term_size",
    "term_vars",
    "total_mass",
    "trace_bounded",
    "trace_direct",
    "trace_equiv_bounded",
    "trace_functional",
    "validate_format",
    "weight_key",
    "word_to_str",
]
