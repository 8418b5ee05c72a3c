"""Operational models: the step function induced by a specification.

``step`` is the canonical model obtained by structural recursion through the
composite law; ``step_direct`` recomputes transitions rule by rule from the
inductive reading of the format (premise witnesses multiplied out), sharing
no code with the law pipeline so the two can check each other.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

from .formalsum import (
    STOP,
    FormalSum,
    Step,
    belem_map,
    fs_map,
    fs_total,
    is_affine,
)
from .law import bar_rho_step
from .terms import Leaf, Node, Var, enumerate_closed_terms, graft, print_term, substitute


class ModelCache:
    """Per-spec memo tables; rebuilt automatically, safe to discard."""

    def __init__(self):
        self.step = {}
        self.direct = {}
        self.trace = {}
        self.partial = {}


_caches = weakref.WeakKeyDictionary()


def model_cache(spec):
    cache = _caches.get(spec)
    if cache is None:
        cache = ModelCache()
        _caches[spec] = cache
    return cache


def step(spec, term, cache=True):
    """Behaviour of a closed term: a formal sum of Step(label, term) / STOP."""
    if not isinstance(term, Node):
        raise TypeError(f"step needs a closed term, got {term!r}")
    memo = model_cache(spec).step if cache else None
    return _step(spec, term, memo)


def _step(spec, term, memo):
    if memo is not None:
        hit = memo.get(term)
        if hit is not None:
            return hit
    pairs = [(child, _step(spec, child, memo)) for child in term.children]
    stepped = bar_rho_step(spec, term.op, pairs)
    result = fs_map(lambda e: belem_map(e, graft), stepped)
    if memo is not None:
        memo[term] = result
    return result


def step_direct(spec, term, cache=True):
    """Transitions of a closed term computed straight from the rules.

    For each rule, premise transitions range over the matching entries of the
    arguments' (recursively direct) behaviours; a combination contributes the
    rule weight times the premise weights. The desimone dialect additionally
    always observes termination.
    """
    if not isinstance(term, Node):
        raise TypeError(f"step_direct needs a closed term, got {term!r}")
    memo = model_cache(spec).direct if cache else None
    return _step_direct(spec, term, memo)


def _step_direct(spec, term, memo):
    if memo is not None:
        hit = memo.get(term)
        if hit is not None:
            return hit
    sr = spec.semiring
    child_behaviours = [_step_direct(spec, c, memo) for c in term.children]

    entries = []
    if spec.dialect == "desimone":
        entries.append((STOP, sr.one))

    for rule in spec.rules_for(term.op):
        # weight factors from termination premises
        base = rule.weight
        ok = True
        for p in rule.term_premises():
            w = child_behaviours[p.index - 1].weight(STOP)
            if sr.is_zero(w):
                ok = False
                break
            base = sr.mul(base, w)
        if not ok or sr.is_zero(base):
            continue

        # each transition premise independently picks a matching entry
        combos = [((), base)]
        for p in rule.trans_premises():
            behaviour = child_behaviours[p.index - 1]
            matching = [
                (e.target, w)
                for e, w in behaviour.items()
                if isinstance(e, Step) and e.label == p.label
            ]
            combos = [
                (picked + (succ,), sr.mul(acc, w))
                for picked, acc in combos
                for succ, w in matching
            ]

        trans_indices = [p.index for p in rule.trans_premises()]
        premised = {p.index for p in rule.premises}
        for picked, weight in combos:
            if sr.is_zero(weight):
                continue
            if rule.target is None:
                entries.append((STOP, weight))
                continue
            subst = {Var("y", i): succ for i, succ in zip(trans_indices, picked)}
            for j, child in enumerate(term.children, start=1):
                if j not in premised:
                    subst[Var("x", j)] = child
            entries.append((Step(rule.label, substitute(rule.target, subst)), weight))

    result = FormalSum(sr, entries)
    if memo is not None:
        memo[term] = result
    return result


def reachable(spec, term, depth):
    """The set of terms visitable in at most `depth` transitions."""
    seen = {term}
    frontier = [term]
    for _ in range(depth):
        new = []
        for t in frontier:
            for e in step(spec, t):
                if isinstance(e, Step) and e.target not in seen:
                    seen.add(e.target)
                    new.append(e.target)
        if not new:
            break
        frontier = new
    return seen


@dataclass
class ProbReport:
    passed: bool
    bound: int
    checked: int
    violator: object = None
    mass: object = None

    def describe(self, semiring):
        if self.passed:
            return f"probabilistic: all {self.checked} terms have step mass 1"
        return (
            f"not probabilistic: {print_term(self.violator)} has step mass "
            f"{semiring.show(self.mass)}"
        )


def check_probabilistic(spec, size_bound):
    """Every enumerated and reachable term must have step mass exactly one."""
    if spec.semiring.name != "rational":
        raise ValueError("check_probabilistic is not applicable to the boolean dialect")
    checked = 0
    seen = set()
    queue = []
    for t in enumerate_closed_terms(spec.signature, size_bound):
        if t not in seen:
            seen.add(t)
            queue.append((t, 0))
    i = 0
    while i < len(queue):
        t, hops = queue[i]
        i += 1
        checked += 1
        behaviour = step(spec, t)
        if not is_affine(behaviour):
            return ProbReport(
                passed=False,
                bound=size_bound,
                checked=checked,
                violator=t,
                mass=fs_total(behaviour),
            )
        if hops < size_bound:
            for e in behaviour:
                if isinstance(e, Step) and e.target not in seen:
                    seen.add(e.target)
                    queue.append((e.target, hops + 1))
    return ProbReport(passed=True, bound=size_bound, checked=checked)
