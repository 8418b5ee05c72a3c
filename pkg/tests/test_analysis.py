"""Equivalence checking, context generation, congruence search, and the
bisimulation quotient behind it."""

from fractions import Fraction

import pytest

from desimone import (
    BOOLEAN,
    Context,
    HOLE,
    Leaf,
    Node,
    Var,
    bisim_partition,
    congruence_test,
    counterexample_search,
    enumerate_closed_terms,
    fingerprint_buckets,
    first_difference,
    generate_contexts,
    generate_pairs,
    load_spec,
    observably_equiv_bounded,
    parse_spec,
    parse_term,
    partial_trace_bounded,
    print_term,
    trace_bounded,
    trace_direct,
    trace_equiv_bounded,
)
from oracles import coarsest_bisimulation

F = Fraction


def t(spec, text):
    return parse_term(spec.signature, text)


@pytest.fixture
def depth_artifact_pair(prob_par):
    # equal completed tables at depth 4, different length-3 partial words
    return (
        t(prob_par, "pre_a(pre_a(pre_a(pre_a(nil))))"),
        t(prob_par, "pre_a(pre_a(pre_b(pre_a(nil))))"),
    )


# --- bounded equivalences ----------------------------------------------------

def test_trace_equiv_worked_examples(prob_par, de_simone_par):
    assert trace_equiv_bounded(
        prob_par, t(prob_par, "nil"), t(prob_par, "par(nil, nil)"), 6
    )
    assert not trace_equiv_bounded(
        prob_par, t(prob_par, "pre_a(nil)"), t(prob_par, "pre_b(nil)"), 2
    )
    assert trace_equiv_bounded(
        de_simone_par,
        t(de_simone_par, "plus(pre_a(nil), pre_a(nil))"),
        t(de_simone_par, "pre_a(nil)"),
        5,
    )


def test_completed_tables_can_hide_a_pending_difference(prob_par, depth_artifact_pair):
    t1, t2 = depth_artifact_pair
    assert trace_equiv_bounded(prob_par, t1, t2, 4)
    assert not observably_equiv_bounded(prob_par, t1, t2, 4)
    assert not trace_equiv_bounded(prob_par, t1, t2, 5)
    # a context can surface the pending letters inside completed words of
    # the same depth, so the refined precondition is what congruence needs
    context = Context(Node("par", [Leaf(HOLE), t(prob_par, "nil")]))
    assert trace_bounded(prob_par, context.apply(t1), 4) != trace_bounded(
        prob_par, context.apply(t2), 4
    )


def test_observable_equivalence_is_plain_trace_equality_when_boolean(de_simone_par):
    terms = list(enumerate_closed_terms(de_simone_par.signature, 3))
    for depth in (1, 2, 4):
        for a in terms:
            for b in terms:
                assert observably_equiv_bounded(
                    de_simone_par, a, b, depth
                ) == trace_equiv_bounded(de_simone_par, a, b, depth)


def test_first_difference_reports_length_lex_first_word(prob_par, de_simone_par):
    got = first_difference(
        prob_par,
        t(prob_par, "par(pre_a(nil), pre_a(nil))"),
        t(prob_par, "pre_a(pre_a(nil))"),
        4,
    )
    assert got == (("a",), F(1, 2), F(0))
    got = first_difference(
        de_simone_par,
        t(de_simone_par, "plus(pre_a(nil), pre_b(nil))"),
        t(de_simone_par, "pre_a(nil)"),
        3,
    )
    assert got == (("b",), BOOLEAN.one, BOOLEAN.zero)


def test_first_difference_is_none_for_equal_tables(prob_par, depth_artifact_pair):
    t1, t2 = depth_artifact_pair
    assert first_difference(prob_par, t1, t1, 5) is None
    # completed tables agree at this depth even though the terms differ
    assert first_difference(prob_par, t1, t2, 4) is None


# --- context generation ------------------------------------------------------

def test_depth_one_layer_comes_first_in_operator_order(prob_par):
    shows = [c.show() for c in generate_contexts(prob_par, 6, 3, 0)]
    assert shows[:4] == ["pre_a([])", "pre_b([])", "par([], nil)", "par(nil, [])"]
    assert len(shows) == 6


def test_every_context_has_exactly_one_hole(prob_par, copy_nonaffine):
    for spec in (prob_par, copy_nonaffine):
        for c in generate_contexts(spec, 25, 5, 3):
            assert c.show().count("[]") == 1


def test_context_generation_is_deterministic(prob_par):
    first = [c.show() for c in generate_contexts(prob_par, 12, 4, 7)]
    again = [c.show() for c in generate_contexts(prob_par, 12, 4, 7)]
    assert first == again and len(first) == 12
    assert len(set(first)) == 12


def test_context_count_must_be_positive(prob_par):
    with pytest.raises(ValueError):
        generate_contexts(prob_par, 0, 3, 0)


def test_context_apply(prob_par):
    context = Context(Node("par", [Leaf(HOLE), t(prob_par, "nil")]))
    assert print_term(context.apply(t(prob_par, "pre_a(nil)"))) == "par(pre_a(nil), nil)"
    assert context.show() == "par([], nil)"


def test_applying_a_context_with_a_stray_leaf_fails(prob_par):
    bad = Context(Node("pre_a", [Leaf(Var("x", 1))]))
    with pytest.raises(ValueError):
        bad.apply(t(prob_par, "nil"))


# --- fingerprint buckets and candidate pairs ---------------------------------

def test_buckets_partition_the_enumeration(prob_par):
    buckets = fingerprint_buckets(prob_par, 4, 3)
    members = [m for _, ms in buckets for m in ms]
    assert sorted(map(print_term, members)) == sorted(
        print_term(x) for x in enumerate_closed_terms(prob_par.signature, 4)
    )
    for _, ms in buckets:
        for a in ms:
            for b in ms:
                assert observably_equiv_bounded(prob_par, a, b, 3)
    reps = [ms[0] for _, ms in buckets]
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            assert not observably_equiv_bounded(prob_par, a, b, 3)


def test_generated_pairs_are_equivalent_and_deterministic(prob_par):
    pairs = generate_pairs(prob_par, 4, 3, 5)
    assert len(pairs) == 5
    assert pairs == generate_pairs(prob_par, 4, 3, 5)
    assert (print_term(pairs[0][0]), print_term(pairs[0][1])) == (
        "nil",
        "par(nil, nil)",
    )
    for a, b in pairs:
        assert observably_equiv_bounded(prob_par, a, b, 3)


# --- congruence testing ------------------------------------------------------

def test_congruence_clean_pair_and_skip_accounting(prob_par, depth_artifact_pair):
    contexts = generate_contexts(prob_par, 6, 3, 0)
    chain_pair = depth_artifact_pair
    same = (t(prob_par, "nil"), t(prob_par, "par(nil, nil)"))
    report = congruence_test(prob_par, [chain_pair, same], contexts, 4)
    assert report.passed
    assert report.pairs_checked == 1
    assert report.skipped == [chain_pair]
    assert report.depth == 4 and report.contexts == 6


def test_congruence_catches_the_copying_operator(copy_nonaffine):
    left = t(copy_nonaffine, "pre_a(plus(pre_b(nil), pre_c(nil)))")
    right = t(copy_nonaffine, "plus(pre_a(pre_b(nil)), pre_a(pre_c(nil)))")
    assert trace_equiv_bounded(copy_nonaffine, left, right, 4)
    f_hole = Context(Node("f", [Leaf(HOLE)]))
    report = congruence_test(copy_nonaffine, [(left, right)], [f_hole], 4)
    assert not report.passed and len(report.violations) == 1
    v = report.violations[0]
    assert v.word == ("a", "b", "c")
    assert (v.left_weight, v.right_weight) == (BOOLEAN.one, BOOLEAN.zero)
    assert v.verified and not v.deep_context
    described = v.describe(copy_nonaffine)
    assert described["context"] == "f([])"
    assert described["word"] == "abc"
    assert described["left_weight"] == "1" and described["right_weight"] == "0"


# --- bisimulation quotient ---------------------------------------------------

def test_bisim_worked_examples(prob_par, de_simone_par):
    blocks = bisim_partition(
        prob_par,
        [t(prob_par, "nil"), t(prob_par, "par(nil, nil)"), t(prob_par, "pre_a(nil)")],
    )
    assert blocks[t(prob_par, "nil")] == blocks[t(prob_par, "par(nil, nil)")]
    assert blocks[t(prob_par, "nil")] != blocks[t(prob_par, "pre_a(nil)")]
    blocks = bisim_partition(
        de_simone_par,
        [
            t(de_simone_par, "pre_a(nil)"),
            t(de_simone_par, "plus(pre_a(nil), pre_a(nil))"),
            t(de_simone_par, "pre_b(nil)"),
        ],
    )
    assert (
        blocks[t(de_simone_par, "pre_a(nil)")]
        == blocks[t(de_simone_par, "plus(pre_a(nil), pre_a(nil))")]
    )
    assert (
        blocks[t(de_simone_par, "pre_a(nil)")] != blocks[t(de_simone_par, "pre_b(nil)")]
    )


def test_bisim_collapses_dead_terms():
    spec = parse_spec(
        "dialect weighted\nsemiring rational\nlabels a\n"
        "op d1 : 0\nop d2 : 0\nop c : 0\nrule c -a[1]-> d1\n"
    )
    blocks = bisim_partition(spec, [t(spec, "d1"), t(spec, "d2"), t(spec, "c")])
    assert blocks[t(spec, "d1")] == blocks[t(spec, "d2")]
    assert blocks[t(spec, "c")] != blocks[t(spec, "d1")]


def test_bisim_matches_exhaustive_search(prob_par):
    seeds = list(enumerate_closed_terms(prob_par.signature, 3))
    got = bisim_partition(prob_par, seeds)
    blocks = {}
    for term, b in got.items():
        blocks.setdefault(b, set()).add(term)
    assert frozenset(frozenset(b) for b in blocks.values()) == coarsest_bisimulation(
        prob_par, seeds
    )


def test_bisim_block_ids_are_dense_and_deterministic(prob_par):
    seeds = list(enumerate_closed_terms(prob_par.signature, 4))
    got = bisim_partition(prob_par, seeds)
    ids = set(got.values())
    assert ids == set(range(len(ids)))
    assert got == bisim_partition(prob_par, seeds)


def test_bisimilar_terms_share_trace_tables(prob_par):
    seeds = list(enumerate_closed_terms(prob_par.signature, 4))
    blocks = bisim_partition(prob_par, seeds)
    by_block = {}
    for term in seeds:
        by_block.setdefault(blocks[term], []).append(term)
    for members in by_block.values():
        rep = members[0]
        for other in members[1:]:
            assert trace_bounded(prob_par, rep, 5) == trace_bounded(
                prob_par, other, 5
            )
            assert partial_trace_bounded(prob_par, rep, 4) == partial_trace_bounded(
                prob_par, other, 4
            )


def test_bisim_state_cap(prob_par):
    with pytest.raises(ValueError):
        bisim_partition(
            prob_par, list(enumerate_closed_terms(prob_par.signature, 5)), max_states=3
        )


# --- counterexample search ---------------------------------------------------

def test_search_is_silent_on_well_formed_specs(prob_par, de_simone_par, loop):
    assert counterexample_search(prob_par, size_bound=4, depth=3) is None
    assert counterexample_search(de_simone_par, size_bound=4, depth=3) is None
    assert counterexample_search(loop, size_bound=3, depth=3) is None


def test_search_finds_the_copying_violation(copy_nonaffine, copy_violation):
    violation, _ = copy_violation
    assert print_term(violation.left) == "pre_a(plus(pre_b(nil), pre_c(nil)))"
    assert print_term(violation.right) == "plus(pre_a(pre_b(nil)), pre_a(pre_c(nil)))"
    assert violation.context.show() == "f([])"
    assert violation.word == ("a", "b", "c")
    assert (violation.left_weight, violation.right_weight) == (
        BOOLEAN.one,
        BOOLEAN.zero,
    )
    assert violation.verified and not violation.deep_context
    # recheck through the path-sum oracle, away from the fixpoint machinery
    plugged_left = violation.context.apply(violation.left)
    plugged_right = violation.context.apply(violation.right)
    assert trace_direct(copy_nonaffine, plugged_left, 3).weight(violation.word) == 1
    assert trace_direct(copy_nonaffine, plugged_right, 3).weight(violation.word) == 0
