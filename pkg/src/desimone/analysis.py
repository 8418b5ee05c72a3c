"""Bounded trace equivalence and empirical congruence testing.

Congruence failures are what the affineness condition is about: two terms
with equal bounded trace tables whose tables split under some one-hole
context. Pair candidates come from bucketing enumerated terms by trace
fingerprint; contexts are the complete depth-1 layer followed by seeded
random one-hole terms. Search iterates buckets in enumeration order and
splits each bucket by per-context fingerprints, so the first reported
violation is deterministic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .formalsum import STOP, Step
from .opmodel import step
from .ordering import payload_key
from .semiring import weight_key
from .terms import (
    Leaf,
    Node,
    enumerate_closed_terms,
    print_term,
    term_size,
)
from .trace import partial_trace_bounded, trace_bounded, trace_direct


class _Hole:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "HOLE"

    def __hash__(self):
        return hash("desimone-hole")

    def __eq__(self, other):
        return isinstance(other, _Hole)

    def _canon_key(self):
        return ("hole",)


HOLE = _Hole()


@dataclass(frozen=True)
class Context:
    """A term with exactly one hole leaf."""

    term: object

    def apply(self, t):
        return _plug(self.term, t)

    def show(self):
        return _print_context(self.term)


def _plug(c, t):
    if isinstance(c, Leaf):
        if c.payload is HOLE:
            return t
        raise ValueError(f"stray leaf {c.payload!r} in context")
    return Node(c.op, [_plug(child, t) for child in c.children])


def _print_context(c):
    if isinstance(c, Leaf):
        return "[]"
    if not c.children:
        return c.op
    return f"{c.op}({', '.join(_print_context(ch) for ch in c.children)})"


def _hole_count(c):
    if isinstance(c, Leaf):
        return 1 if c.payload is HOLE else 0
    return sum(_hole_count(ch) for ch in c.children)


def trace_equiv_bounded(spec, t, s, depth):
    """Exact equality of bounded trace tables."""
    return trace_bounded(spec, t, depth) == trace_bounded(spec, s, depth)


def _fingerprint(spec, t, depth):
    """Everything a depth-bounded context can observe of a term.

    A context word of length < depth exposes the plugged term's completed
    traces and its partial words up to the same length; pairs equal only on
    the completed table can still split under a context that interleaves
    termination, which would misreport well-formed specs. In the desimone
    dialect every state terminates, so the partial table adds nothing and is
    skipped.
    """
    if spec.dialect == "desimone":
        return trace_bounded(spec, t, depth)
    return (
        trace_bounded(spec, t, depth),
        partial_trace_bounded(spec, t, depth - 1),
    )


def observably_equiv_bounded(spec, t, s, depth):
    """Bounded trace equivalence refined with partial-trace agreement."""
    return _fingerprint(spec, t, depth) == _fingerprint(spec, s, depth)


def first_difference(spec, t, s, depth):
    """Length-lex first word whose weights differ, with both weights."""
    a = trace_bounded(spec, t, depth)
    b = trace_bounded(spec, s, depth)
    words = sorted(set(a.payloads()) | set(b.payloads()), key=payload_key)
    for w in words:
        if a.weight(w) != b.weight(w):
            return w, a.weight(w), b.weight(w)
    return None


def generate_contexts(spec, count, max_size, seed):
    """Depth-1 contexts first (every operator, every hole position, remaining
    slots filled with the least closed term), then distinct seeded random
    one-hole contexts up to the size bound."""
    if count < 1:
        raise ValueError("context count must be at least 1")
    sig = spec.signature
    filler_pool = list(enumerate_closed_terms(sig, max(max_size, 1)))
    if not filler_pool:
        raise ValueError("signature has no closed terms to fill context slots")
    filler = filler_pool[0]

    contexts = []
    seen = set()

    def add(term):
        if term not in seen:
            seen.add(term)
            contexts.append(Context(term))

    hole = Leaf(HOLE)
    for op in sig.names():
        arity = sig.arity(op)
        for position in range(arity):
            children = [filler] * arity
            children[position] = hole
            add(Node(op, children))

    rng = random.Random(seed)
    hosts = [t for t in filler_pool if term_size(t) >= 2]
    attempts = 0
    while len(contexts) < count and hosts and attempts < 50 * count:
        attempts += 1
        term = _random_context(rng, hosts)
        if _hole_count(term) == 1:
            add(term)
    return contexts[:count] if len(contexts) > count else contexts


def _node_paths(t, prefix=()):
    yield prefix
    for i, c in enumerate(t.children):
        yield from _node_paths(c, prefix + (i,))


def _replace_at(t, path, replacement):
    if not path:
        return replacement
    i, rest = path[0], path[1:]
    children = list(t.children)
    children[i] = _replace_at(children[i], rest, replacement)
    return Node(t.op, children)


def _random_context(rng, hosts):
    """Punch a hole at a random non-root position of a random closed term."""
    host = rng.choice(hosts)
    paths = [p for p in _node_paths(host) if p]
    return _replace_at(host, rng.choice(paths), Leaf(HOLE))


@dataclass
class CongruenceViolation:
    left: object
    right: object
    context: Context
    word: tuple
    left_weight: object
    right_weight: object
    verified: bool = False
    deep_context: bool = False  # split found beyond the depth-1 layer only

    def describe(self, spec):
        from .trace import word_to_str

        return {
            "pair": [print_term(self.left), print_term(self.right)],
            "context": self.context.show(),
            "word": word_to_str(self.word, spec.labels),
            "left_weight": spec.semiring.show(self.left_weight),
            "right_weight": spec.semiring.show(self.right_weight),
            "verified": self.verified,
            "deep_context": self.deep_context,
        }


@dataclass
class CongruenceReport:
    depth: int
    contexts: int
    pairs_checked: int
    violations: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # pairs not trace-equivalent

    @property
    def passed(self):
        return not self.violations


def _verify_violation(spec, violation, depth):
    """Recompute the split through the path-sum oracle."""
    ct = violation.context.apply(violation.left)
    cs = violation.context.apply(violation.right)
    a = trace_direct(spec, ct, depth - 1)
    b = trace_direct(spec, cs, depth - 1)
    return (
        a.weight(violation.word) == violation.left_weight
        and b.weight(violation.word) == violation.right_weight
        and violation.left_weight != violation.right_weight
    )


def _split_violation(spec, members, context, depth, depth1_clean):
    """First pair of members whose composites' tables differ under context."""
    tables = [trace_bounded(spec, context.apply(t), depth) for t in members]
    base = tables[0]
    for t, table in zip(members[1:], tables[1:]):
        if table != base:
            words = sorted(set(base.payloads()) | set(table.payloads()), key=payload_key)
            for w in words:
                if base.weight(w) != table.weight(w):
                    v = CongruenceViolation(
                        left=members[0],
                        right=t,
                        context=context,
                        word=w,
                        left_weight=base.weight(w),
                        right_weight=table.weight(w),
                        deep_context=depth1_clean,
                    )
                    v.verified = _verify_violation(spec, v, depth)
                    return v
    return None


def congruence_test(spec, pairs, contexts, depth):
    """Check each trace-equivalent pair under every context.

    Pairs failing the equivalence precondition (completed tables at ``depth``
    plus partial words below it) are recorded as skipped. For a violating
    pair only the first splitting context is reported; the ``deep_context``
    flag marks splits that the complete depth-1 layer missed.
    """
    depth1_arity = sum(spec.signature.arity(op) for op in spec.signature.names())
    report = CongruenceReport(depth=depth, contexts=len(contexts), pairs_checked=0)
    for t, s in pairs:
        if not observably_equiv_bounded(spec, t, s, depth):
            report.skipped.append((t, s))
            continue
        report.pairs_checked += 1
        for i, context in enumerate(contexts):
            a = trace_bounded(spec, context.apply(t), depth)
            b = trace_bounded(spec, context.apply(s), depth)
            if a != b:
                word, wa, wb = _first_table_difference(a, b)
                # contexts from generate_contexts lead with the complete
                # depth-1 layer, so a first split past it is an anomaly
                v = CongruenceViolation(
                    left=t,
                    right=s,
                    context=context,
                    word=word,
                    left_weight=wa,
                    right_weight=wb,
                    deep_context=i >= depth1_arity,
                )
                v.verified = _verify_violation(spec, v, depth)
                report.violations.append(v)
                break
    return report


def _first_table_difference(a, b):
    words = sorted(set(a.payloads()) | set(b.payloads()), key=payload_key)
    for w in words:
        if a.weight(w) != b.weight(w):
            return w, a.weight(w), b.weight(w)
    raise AssertionError("tables compared unequal but no differing word found")


def bisim_partition(spec, terms, max_states=200000):
    """Partition terms, and everything they reach, by weighted bisimilarity.

    Returns {term: block id} with dense integer ids, deterministic for a
    fixed input order. Partition refinement on the memoized step behaviours:
    a state's signature is its termination weight plus its per-(label, block)
    summed transition weight; blocks split until the count is stable.

    Bisimilar terms have equal bounded trace tables under every context,
    copying contexts included, so the congruence search only ever needs one
    representative per block.
    """
    sr = spec.semiring
    order = []
    seen = set()
    for t in terms:
        if t not in seen:
            seen.add(t)
            order.append(t)
    i = 0
    while i < len(order):
        if len(order) > max_states:
            raise ValueError(f"reachable state space exceeds {max_states} states")
        t = order[i]
        i += 1
        for e in step(spec, t):
            if isinstance(e, Step) and e.target not in seen:
                seen.add(e.target)
                order.append(e.target)

    def assign(sig_of):
        ids = {}
        out = {}
        for t in order:
            s = sig_of(t)
            if s not in ids:
                ids[s] = len(ids)
            out[t] = ids[s]
        return out

    current = {t: 0 for t in order}
    blocks = 1
    while True:
        def sig(t):
            behaviour = step(spec, t)
            agg = {}
            for e, w in behaviour.items():
                if e is STOP:
                    continue
                key = (e.label, current[e.target])
                agg[key] = sr.add(agg.get(key, sr.zero), w)
            return (
                current[t],
                weight_key(behaviour.weight(STOP)),
                tuple(sorted((k, weight_key(w)) for k, w in agg.items())),
            )

        refined = assign(sig)
        refined_blocks = len(set(refined.values()))
        if refined_blocks == blocks:
            return refined
        current, blocks = refined, refined_blocks


def fingerprint_buckets(spec, size_bound, depth):
    """Group enumerated closed terms by what bounded contexts can observe.

    The fingerprint is the completed trace table at ``depth``, refined in
    the weighted dialect with the partial-word table below it.
    """
    buckets = {}
    order = []
    for t in enumerate_closed_terms(spec.signature, size_bound):
        fp = _fingerprint(spec, t, depth)
        if fp not in buckets:
            buckets[fp] = []
            order.append(fp)
        buckets[fp].append(t)
    return [(fp, buckets[fp]) for fp in order]


def generate_pairs(spec, size_bound, depth, max_pairs):
    """Trace-equivalent candidate pairs: within-bucket, enumeration order."""
    pairs = []
    for _, members in fingerprint_buckets(spec, size_bound, depth):
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                pairs.append((members[i], members[j]))
                if len(pairs) >= max_pairs:
                    return pairs
    return pairs


def counterexample_search(
    spec, size_bound, depth, extra_contexts=100, context_size=None, seed=0
):
    """First congruence violation among enumerated trace-equivalent terms.

    Buckets are visited in enumeration order of their least member, with
    members first deduplicated up to bisimilarity (a context that splits a
    member splits its representative too). Within a bucket the complete
    depth-1 context layer is tried before the sampled ones, and the reported
    pair is the bucket's least member against the representative of the
    first block that splits away from it.
    """
    if context_size is None:
        context_size = size_bound
    buckets = [
        (fp, members)
        for fp, members in fingerprint_buckets(spec, size_bound, depth)
        if len(members) > 1
    ]
    try:
        blocks = bisim_partition(
            spec, [m for _, members in buckets for m in members]
        )
    except ValueError:
        blocks = None  # state space too large to quotient; scan everything
    depth1_arity = sum(spec.signature.arity(op) for op in spec.signature.names())
    contexts = generate_contexts(
        spec, count=depth1_arity + extra_contexts, max_size=context_size, seed=seed
    )
    for _, members in buckets:
        if blocks is not None:
            reps, seen = [], set()
            for m in members:
                if blocks[m] not in seen:
                    seen.add(blocks[m])
                    reps.append(m)
        else:
            reps = members
        if len(reps) < 2:
            continue
        for i, context in enumerate(contexts):
            v = _split_violation(spec, reps, context, depth, i >= depth1_arity)
            if v is not None:
                return v
    return None
