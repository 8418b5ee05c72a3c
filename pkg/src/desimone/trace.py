"""Depth-bounded trace semantics and almost-sure-termination estimation.

A trace table is a formal sum over words (tuples of labels, first action
first). ``trace_bounded`` iterates the trace functional from the empty table;
``trace_direct`` recomputes weights by summing over explicit transition
paths, an independent oracle. ``ast_estimate`` watches the completed-trace
mass grow with depth and, when the reachable state space closes, pins the
limit down exactly.

Open questions
--------------
The bundled thirty-cell leaky chain terminates with exact mass
2147483647/3221225472, one 3221225472-th short of 2/3: cell n stops with
weight 1/(2**n + 2), and the per-cell contributions 1/3, 1/6, 1/24, ...
decay fast enough for the sum to settle well below 1. Truncating that sum
after two cells gives exactly 1/2 (1/3 plus 2/3 of 1/4), a figure easy to
mistake for the limit when the chain is summarized coarsely; the remaining
cells contribute another sixth. Any quoted termination probability for this
chain should be checked against which truncation it reflects.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .formalsum import STOP, FormalSum, Step, fs_total
from .opmodel import model_cache, step
from .terms import Node

Word = tuple


def empty_table(semiring):
    return FormalSum(semiring)


def trace_functional(spec, table, term):
    """One application of the trace transformer at ``term``.

    ``table`` maps terms to trace tables (absent terms mean the empty
    table). The result gives each word ``(a,) + w`` the step-weighted mass
    of ``w`` at the successor, plus the termination weight on the empty word.
    """
    sr = spec.semiring
    entries = []
    for e, w in step(spec, term).items():
        if e is STOP:
            entries.append(((), w))
            continue
        succ_table = table.get(e.target)
        if succ_table is None:
            continue
        for word, mass in succ_table.items():
            entries.append(((e.label,) + word, sr.mul(w, mass)))
    return FormalSum(sr, entries)


def trace_bounded(spec, term, depth):
    """The depth-th iterate of the trace functional from the empty table.

    Contains exactly the completed traces of length <= depth - 1.
    """
    if not isinstance(term, Node):
        raise TypeError(f"trace_bounded needs a closed term, got {term!r}")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    memo = model_cache(spec).trace
    return _trace_bounded(spec, term, depth, memo)


def _trace_bounded(spec, term, depth, memo):
    if depth == 0:
        return empty_table(spec.semiring)
    key = (term, depth)
    hit = memo.get(key)
    if hit is not None:
        return hit
    sr = spec.semiring
    entries = []
    for e, w in step(spec, term).items():
        if e is STOP:
            entries.append(((), w))
            continue
        for word, mass in _trace_bounded(spec, e.target, depth - 1, memo).items():
            entries.append(((e.label,) + word, sr.mul(w, mass)))
    result = FormalSum(sr, entries)
    memo[key] = result
    return result


def partial_trace_bounded(spec, term, max_len):
    """Weight of performing each word of length <= max_len, terminating or not.

    The empty word always carries weight one. Together with the completed
    table this is everything a depth-bounded context can observe of a term,
    which is why the congruence machinery fingerprints on both.
    """
    if not isinstance(term, Node):
        raise TypeError(f"partial_trace_bounded needs a closed term, got {term!r}")
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    memo = model_cache(spec).partial
    return _partial_bounded(spec, term, max_len, memo)


def _partial_bounded(spec, term, max_len, memo):
    sr = spec.semiring
    if max_len == 0:
        return FormalSum(sr, [((), sr.one)])
    key = (term, max_len)
    hit = memo.get(key)
    if hit is not None:
        return hit
    entries = [((), sr.one)]
    for e, w in step(spec, term).items():
        if e is STOP:
            continue
        for word, mass in _partial_bounded(spec, e.target, max_len - 1, memo).items():
            entries.append(((e.label,) + word, sr.mul(w, mass)))
    result = FormalSum(sr, entries)
    memo[key] = result
    return result


def trace_direct(spec, term, max_len):
    """Word weights summed over explicit transition paths of length <= max_len."""
    if not isinstance(term, Node):
        raise TypeError(f"trace_direct needs a closed term, got {term!r}")
    sr = spec.semiring
    entries = []

    def walk(t, word, weight):
        behaviour = step(spec, t)
        stop_w = behaviour.weight(STOP)
        if not sr.is_zero(stop_w):
            entries.append((word, sr.mul(weight, stop_w)))
        if len(word) >= max_len:
            return
        for e, w in behaviour.items():
            if isinstance(e, Step):
                walk(e.target, word + (e.label,), sr.mul(weight, w))

    walk(term, (), sr.one)
    return FormalSum(sr, entries)


def total_mass(table):
    return fs_total(table)


def word_to_str(word, labels):
    if all(len(lbl) == 1 for lbl in labels):
        return "".join(word)
    return ".".join(word)


# --- almost-sure termination ----------------------------------------------

AST_TOLERANCE = Fraction(1, 10**6)

@dataclass
class AstReport:
    verdict: str  # "ast-consistent" | "non-ast" | "inconclusive"
    masses: list  # [(depth, weight)]
    exact: bool = False
    limit: object = None  # exact limit mass when computable
    detail: str = ""


def _explore(spec, term, max_states):
    """Reachable closure with a cap; returns (states, successor map, closed)."""
    seen = {term}
    order = [term]
    succ = {}
    i = 0
    while i < len(order):
        if len(order) > max_states:
            return order, succ, False
        t = order[i]
        i += 1
        targets = []
        for e in step(spec, t):
            if isinstance(e, Step):
                targets.append(e.target)
                if e.target not in seen:
                    seen.add(e.target)
                    order.append(e.target)
        succ[t] = targets
    return order, succ, True


def _is_acyclic(order, succ):
    state = {}  # 0 = visiting, 1 = done

    def visit(t):
        stack = [(t, iter(succ[t]))]
        state[t] = 0
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if state.get(nxt) == 0:
                    return False
                if nxt not in state:
                    state[nxt] = 0
                    stack.append((nxt, iter(succ[nxt])))
                    advanced = True
                    break
            if not advanced:
                state[node] = 1
                stack.pop()
        return True

    for t in order:
        if t not in state:
            if not visit(t):
                return False
    return True


def _exact_limit_acyclic(spec, order, succ):
    """Back-substitute limit masses over an acyclic closed state space."""
    sr = spec.semiring
    limit = {}
    for t in order:
        stack = [t]
        while stack:
            node = stack[-1]
            if node in limit:
                stack.pop()
                continue
            pending = [s for s in succ[node] if s not in limit]
            if pending:
                stack.extend(pending)
                continue
            acc = step(spec, node).weight(STOP)
            for e, w in step(spec, node).items():
                if isinstance(e, Step):
                    acc = sr.add(acc, sr.mul(w, limit[e.target]))
            limit[node] = acc
            stack.pop()
    return limit


def ast_estimate(spec, term, max_depth, max_states=10000):
    """Track completed-trace mass by depth and classify termination behaviour.

    The mass sequence is monotone by construction (asserted). A closed
    acyclic reachable space gives the exact limit; a closed space in which no
    positive termination weight is reachable pins the limit at zero. In both
    cases a limit short of one is a definite non-termination witness.
    Otherwise the verdict falls back to the mass threshold 1 - 10^-6.
    """
    if spec.semiring.name != "rational":
        raise ValueError("ast_estimate needs the rational semiring")
    sr = spec.semiring
    masses = []
    prev = sr.zero
    for depth in range(1, max_depth + 1):
        mass = total_mass(trace_bounded(spec, term, depth))
        assert sr.leq(prev, mass), "trace mass must be monotone in depth"
        masses.append((depth, mass))
        prev = mass

    order, succ, closed = _explore(spec, term, max_states)
    if closed:
        if _is_acyclic(order, succ):
            limit = _exact_limit_acyclic(spec, order, succ)[term]
            if limit == sr.one:
                verdict = "ast-consistent"
                detail = "closed acyclic state space; limit mass is exactly 1"
            else:
                verdict = "non-ast"
                detail = (
                    "closed acyclic state space; limit mass is exactly "
                    f"{sr.show(limit)} < 1"
                )
            return AstReport(verdict, masses, exact=True, limit=limit, detail=detail)
        stop_somewhere = any(
            not sr.is_zero(step(spec, t).weight(STOP)) for t in order
        )
        if not stop_somewhere:
            return AstReport(
                "non-ast",
                masses,
                exact=True,
                limit=sr.zero,
                detail="no reachable state has positive termination weight",
            )

    threshold = Fraction(1) - AST_TOLERANCE
    final = masses[-1][1] if masses else sr.zero
    if sr.leq(threshold, final):
        return AstReport(
            "ast-consistent",
            masses,
            detail=f"mass reached {sr.show(final)} >= 1 - 10^-6 by depth {max_depth}",
        )
    return AstReport(
        "inconclusive",
        masses,
        detail=f"mass {sr.show(final)} at depth {max_depth}; no closure argument applies",
    )
