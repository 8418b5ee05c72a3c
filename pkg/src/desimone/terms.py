"""Free terms over a ranked signature, with leaves carrying arbitrary payloads.

A term is either ``Leaf(payload)`` or ``Node(op, children)``. Leaf payloads are
rule variables (``Var``), closed subterms (when a term-over-terms is about to be
grafted), or formal sums (inside the distributivity transformations). Closed
terms are all-``Node`` trees over a signature.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class Var:
    """A rule variable: x_i (source argument) or y_i (premise successor)."""

    kind: str  # "x" or "y"
    index: int  # 1-based argument position

    def __post_init__(self):
        if self.kind not in ("x", "y"):
            raise ValueError(f"variable kind must be x or y, got {self.kind!r}")
        if self.index < 1:
            raise ValueError(f"variable index must be >= 1, got {self.index}")

    @property
    def name(self):
        return f"{self.kind}{self.index}"

    def __repr__(self):
        return self.name

    def _canon_key(self):
        return ("var", self.kind, self.index)


class Leaf:
    __slots__ = ("payload", "_hash")

    def __init__(self, payload):
        object.__setattr__(self, "payload", payload)
        object.__setattr__(self, "_hash", hash(("leaf", payload)))

    def __setattr__(self, name, value):
        raise AttributeError("Leaf is immutable")

    def __eq__(self, other):
        return isinstance(other, Leaf) and self.payload == other.payload

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Leaf({self.payload!r})"

    def _canon_key(self):
        from .ordering import payload_key

        return ("leaf", payload_key(self.payload))


class Node:
    __slots__ = ("op", "children", "_hash")

    def __init__(self, op, children=()):
        children = tuple(children)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "_hash", hash(("node", op, children)))

    def __setattr__(self, name, value):
        raise AttributeError("Node is immutable")

    def __eq__(self, other):
        return (
            self is other
            or (
                isinstance(other, Node)
                and self._hash == other._hash
                and self.op == other.op
                and self.children == other.children
            )
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Node({self.op!r}, {list(self.children)!r})"

    def _canon_key(self):
        return ("node", self.op, tuple(c._canon_key() for c in self.children))


class Signature:
    """Operator names with arities, in declaration order."""

    def __init__(self, ops):
        self._ops = {}
        for name, arity in ops:
            if name in self._ops:
                raise ValueError(f"operator {name!r} declared twice")
            if arity < 0:
                raise ValueError(f"negative arity for {name!r}")
            self._ops[name] = arity
        self._index = {name: i for i, name in enumerate(self._ops)}

    @property
    def ops(self):
        return dict(self._ops)

    def names(self):
        return list(self._ops)

    def arity(self, name):
        return self._ops[name]

    def op_index(self, name):
        return self._index[name]

    def __contains__(self, name):
        return name in self._ops

    def __eq__(self, other):
        return isinstance(other, Signature) and self._ops == other._ops

    def __repr__(self):
        body = ", ".join(f"{n}/{a}" for n, a in self._ops.items())
        return f"Signature({body})"


def term_size(t):
    """Number of Node constructors (leaves are size 0 carriers of payloads)."""
    if isinstance(t, Leaf):
        return 0
    return 1 + sum(term_size(c) for c in t.children)


def is_closed(t):
    if isinstance(t, Leaf):
        return False
    return all(is_closed(c) for c in t.children)


def leaves(t):
    """Leaf payloads in left-to-right order (occurrences, with repeats)."""
    if isinstance(t, Leaf):
        return [t.payload]
    out = []
    for c in t.children:
        out.extend(leaves(c))
    return out


def term_vars(t):
    return [p for p in leaves(t) if isinstance(p, Var)]


def is_affine_term(t):
    """True iff no variable occurs twice (non-variable leaves are ignored)."""
    seen = set()
    for v in term_vars(t):
        if v in seen:
            return False
        seen.add(v)
    return True


class UnboundVariableError(KeyError):
    pass


def substitute(t, subst):
    """Replace each Leaf(Var) by subst[var] (a term). Missing binding raises."""
    if isinstance(t, Leaf):
        if isinstance(t.payload, Var):
            try:
                return subst[t.payload]
            except KeyError:
                raise UnboundVariableError(t.payload.name) from None
        return t
    return Node(t.op, [substitute(c, subst) for c in t.children])


def graft(t):
    """Collapse a term whose leaf payloads are themselves terms (free-monad mu)."""
    if isinstance(t, Leaf):
        if isinstance(t.payload, (Leaf, Node)):
            return t.payload
        raise TypeError(f"graft on non-term leaf payload {t.payload!r}")
    return Node(t.op, [graft(c) for c in t.children])


def map_leaves(t, f):
    if isinstance(t, Leaf):
        return Leaf(f(t.payload))
    return Node(t.op, [map_leaves(c, f) for c in t.children])


# --- concrete syntax -------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|\(|\)|,)")
_VAR = re.compile(r"^([xy])([0-9]+)$")


class TermSyntaxError(ValueError):
    pass


def _tokenize_term(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise TermSyntaxError(f"bad character at position {pos}: {text[pos:]!r}")
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


def parse_term(signature, text, allow_vars=False):
    """Parse ``op(child, ...)`` concrete syntax; nullary parens optional.

    Identifiers matching ``x<digits>``/``y<digits>`` are variables when
    ``allow_vars`` is set, and rejected otherwise.
    """
    tokens = _tokenize_term(text)
    pos = 0

    def error(msg, at):
        raise TermSyntaxError(f"{msg} (column {at + 1})")

    def parse_one():
        nonlocal pos
        if pos >= len(tokens):
            raise TermSyntaxError("unexpected end of term")
        tok, at = tokens[pos]
        if tok in ("(", ")", ","):
            error(f"expected identifier, got {tok!r}", at)
        pos += 1
        m = _VAR.match(tok)
        if m:
            if not allow_vars:
                error(f"variable {tok!r} not allowed in a closed term", at)
            if pos < len(tokens) and tokens[pos][0] == "(":
                error(f"variable {tok!r} cannot take arguments", at)
            return Leaf(Var(m.group(1), int(m.group(2))))
        if tok not in signature:
            error(f"unknown operator {tok!r}", at)
        arity = signature.arity(tok)
        children = []
        if pos < len(tokens) and tokens[pos][0] == "(":
            pos += 1
            if pos < len(tokens) and tokens[pos][0] == ")":
                pos += 1
            else:
                while True:
                    children.append(parse_one())
                    if pos >= len(tokens):
                        raise TermSyntaxError("unclosed argument list")
                    tok2, at2 = tokens[pos]
                    pos += 1
                    if tok2 == ")":
                        break
                    if tok2 != ",":
                        error(f"expected , or ), got {tok2!r}", at2)
        if len(children) != arity:
            error(f"operator {tok!r} expects {arity} arguments, got {len(children)}", at)
        return Node(tok, children)

    t = parse_one()
    if pos != len(tokens):
        error(f"trailing input {tokens[pos][0]!r}", tokens[pos][1])
    return t


def print_term(t):
    """Canonical rendering; parse_term(print_term(t)) round-trips."""
    if isinstance(t, Leaf):
        if isinstance(t.payload, Var):
            return t.payload.name
        return f"<{t.payload!r}>"
    if not t.children:
        return t.op
    return f"{t.op}({', '.join(print_term(c) for c in t.children)})"


# --- enumeration -----------------------------------------------------------

def term_key(t, signature):
    """Total order: size-major, then op declaration order, then children."""
    if isinstance(t, Leaf):
        raise TypeError("term_key orders closed terms only")
    return (
        term_size(t),
        signature.op_index(t.op),
        tuple(term_key(c, signature) for c in t.children),
    )


def _compositions(total, parts):
    """All ways to write total as an ordered sum of `parts` positive ints."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def closed_terms_of_size(signature, size, _cache=None):
    """All closed terms with exactly `size` Node constructors, sorted."""
    if _cache is None:
        _cache = {}
    if size in _cache:
        return _cache[size]
    out = []
    for op in signature.names():
        arity = signature.arity(op)
        if arity == 0:
            if size == 1:
                out.append(Node(op))
            continue
        for split in _compositions(size - 1, arity):
            pools = [closed_terms_of_size(signature, s, _cache) for s in split]
            stack = [()]
            for pool in pools:
                stack = [partial + (c,) for partial in stack for c in pool]
            out.extend(Node(op, children) for children in stack)
    out.sort(key=lambda t: term_key(t, signature))
    _cache[size] = out
    return out


def enumerate_closed_terms(signature, max_size):
    """Closed terms of size <= max_size, size-ascending, no duplicates."""
    if max_size < 0:
        raise ValueError("max_size must be >= 0")
    cache = {}
    for size in range(1, max_size + 1):
        yield from closed_terms_of_size(signature, size, cache)
