"""Finite-support formal sums over a weight semiring, and the behaviour functors.

``FormalSum`` is the monad T: canonical form keeps nonzero weights only, so
boolean sums are finite sets and rational sums are weight tables. ``Step``/
``STOP`` are the elements of B X = L x X + 1; ``Pure``/``Obs`` tag the
coproduct B0 X = X + B X. The four distributivity transformations used by the
law pipeline live here as well.
"""

from __future__ import annotations

from .ordering import payload_key
from .semiring import Semiring
from .terms import Leaf, Node


class FormalSum:
    """An immutable finite-support map payload -> nonzero weight."""

    __slots__ = ("semiring", "_entries", "_hash")

    def __init__(self, semiring, entries=()):
        if not isinstance(semiring, Semiring):
            raise TypeError("first argument must be a Semiring")
        merged = {}
        it = entries.items() if hasattr(entries, "items") else entries
        for payload, weight in it:
            semiring.check(weight)
            if payload in merged:
                merged[payload] = semiring.add(merged[payload], weight)
            else:
                merged[payload] = weight
        cleaned = {p: w for p, w in merged.items() if not semiring.is_zero(w)}
        object.__setattr__(self, "semiring", semiring)
        object.__setattr__(self, "_entries", cleaned)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("FormalSum is immutable")

    def weight(self, payload):
        return self._entries.get(payload, self.semiring.zero)

    def items(self):
        return self._entries.items()

    def sorted_items(self):
        return sorted(self._entries.items(), key=lambda kv: payload_key(kv[0]))

    def payloads(self):
        return self._entries.keys()

    def __contains__(self, payload):
        return payload in self._entries

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __eq__(self, other):
        return (
            isinstance(other, FormalSum)
            and self.semiring is other.semiring
            and self._entries == other._entries
        )

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.semiring.name, frozenset(self._entries.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        body = ", ".join(
            f"{p!r}: {self.semiring.show(w)}" for p, w in self.sorted_items()
        )
        return f"<{body}>"

    def _canon_key(self):
        from .semiring import weight_key

        return (
            "fs",
            tuple((payload_key(p), weight_key(w)) for p, w in self.sorted_items()),
        )


def fs_unit(semiring, payload):
    return FormalSum(semiring, [(payload, semiring.one)])


def fs_empty(semiring):
    return FormalSum(semiring)


def fs_map(f, s):
    """Push payloads through f; colliding images merge additively."""
    return FormalSum(s.semiring, ((f(p), w) for p, w in s.items()))


def fs_scale(weight, s):
    sr = s.semiring
    return FormalSum(sr, ((p, sr.mul(weight, w)) for p, w in s.items()))


def fs_flatten(s):
    """Monad multiplication: outer weights distribute multiplicatively."""
    sr = s.semiring
    entries = []
    for inner, outer_w in s.items():
        if not isinstance(inner, FormalSum):
            raise TypeError(f"fs_flatten needs sum-of-sums, got payload {inner!r}")
        for p, w in inner.items():
            entries.append((p, sr.mul(outer_w, w)))
    return FormalSum(sr, entries)


def fs_total(s):
    return s.semiring.sum(w for _, w in s.items())


def is_affine(s):
    """Total weight exactly one: nonempty set / probability distribution."""
    return fs_total(s) == s.semiring.one


def fs_leq(s, t):
    """Pointwise order; the approximation order used for trace prefixes."""
    sr = s.semiring
    return all(sr.leq(w, t.weight(p)) for p, w in s.items())


class Inl:
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Inl is immutable")

    def __eq__(self, other):
        return isinstance(other, Inl) and self.value == other.value

    def __hash__(self):
        return hash(("inl", self.value))

    def __repr__(self):
        return f"Inl({self.value!r})"

    def _canon_key(self):
        return ("in", 0, payload_key(self.value))


class Inr:
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Inr is immutable")

    def __eq__(self, other):
        return isinstance(other, Inr) and self.value == other.value

    def __hash__(self):
        return hash(("inr", self.value))

    def __repr__(self):
        return f"Inr({self.value!r})"

    def _canon_key(self):
        return ("in", 1, payload_key(self.value))


def fs_pair_join(s, t, left=Inl, right=Inr):
    """The pairing iso T X x T Y = T(X + Y): tagged disjoint union of entries."""
    if s.semiring is not t.semiring:
        raise ValueError("fs_pair_join needs sums over the same semiring")
    entries = [(left(p), w) for p, w in s.items()]
    entries.extend((right(p), w) for p, w in t.items())
    return FormalSum(s.semiring, entries)


# --- behaviour functor B X = L x X + 1 ------------------------------------

class Step:
    """One labelled transition: (label, successor)."""

    __slots__ = ("label", "target", "_hash")

    def __init__(self, label, target):
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "_hash", hash(("step", label, target)))

    def __setattr__(self, name, value):
        raise AttributeError("Step is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Step)
            and self.label == other.label
            and self.target == other.target
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Step({self.label!r}, {self.target!r})"

    def _canon_key(self):
        return ("belem", 1, self.label, payload_key(self.target))


class _Stop:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "STOP"

    def __hash__(self):
        return hash("desimone-stop")

    def __eq__(self, other):
        return isinstance(other, _Stop)

    def _canon_key(self):
        return ("belem", 0)


STOP = _Stop()


def belem_map(e, f):
    """Apply f to the successor position; STOP is fixed."""
    if e is STOP or isinstance(e, _Stop):
        return STOP
    return Step(e.label, f(e.target))


# --- coproduct tagging B0 X = X + B X -------------------------------------

class Pure:
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Pure is immutable")

    def __eq__(self, other):
        return isinstance(other, Pure) and self.value == other.value

    def __hash__(self):
        return hash(("pure", self.value))

    def __repr__(self):
        return f"Pure({self.value!r})"

    def _canon_key(self):
        return ("b0", 0, payload_key(self.value))


class Obs:
    __slots__ = ("elem",)

    def __init__(self, elem):
        object.__setattr__(self, "elem", elem)

    def __setattr__(self, name, value):
        raise AttributeError("Obs is immutable")

    def __eq__(self, other):
        return isinstance(other, Obs) and self.elem == other.elem

    def __hash__(self):
        return hash(("obs", self.elem))

    def __repr__(self):
        return f"Obs({self.elem!r})"

    def _canon_key(self):
        return ("b0", 1, payload_key(self.elem))


# --- distributivity transformations ---------------------------------------

def dist_b(semiring, e):
    """B T -> T B: move the weight out of the successor; STOP gets weight one."""
    if e is STOP or isinstance(e, _Stop):
        return fs_unit(semiring, STOP)
    inner = e.target
    if not isinstance(inner, FormalSum):
        raise TypeError(f"dist_b expects a formal-sum successor, got {inner!r}")
    return fs_map(lambda p: Step(e.label, p), inner)


def dist_b0(semiring, e):
    """B0 T -> T B0: delegate through the tag."""
    if isinstance(e, Pure):
        inner = e.value
        if not isinstance(inner, FormalSum):
            raise TypeError(f"dist_b0 expects a formal-sum payload, got {inner!r}")
        return fs_map(Pure, inner)
    if isinstance(e, Obs):
        return fs_map(Obs, dist_b(semiring, e.elem))
    raise TypeError(f"not a B0 element: {e!r}")


def dist_sigma(semiring, op, arg_sums):
    """Sigma T -> T Sigma: one independent choice per argument position.

    Returns a sum over flat terms Node(op, Leaf(x1), ..., Leaf(xn)); the
    weight of a combination is the product of the chosen entries' weights.
    """
    combos = [((), semiring.one)]
    for s in arg_sums:
        combos = [
            (chosen + (p,), semiring.mul(acc, w))
            for chosen, acc in combos
            for p, w in s.items()
        ]
    return FormalSum(
        semiring,
        ((Node(op, [Leaf(p) for p in chosen]), w) for chosen, w in combos),
    )


def dist_sigma_star(semiring, t):
    """Sigma* T -> T Sigma*: every leaf occurrence chooses independently.

    Repeated occurrences of the same formal sum are distinct choice points,
    which is exactly what makes non-affine rule targets misbehave.
    """
    if isinstance(t, Leaf):
        inner = t.payload
        if not isinstance(inner, FormalSum):
            raise TypeError(f"dist_sigma_star expects formal-sum leaves, got {inner!r}")
        return fs_map(Leaf, inner)
    child_sums = [dist_sigma_star(semiring, c) for c in t.children]
    combos = [((), semiring.one)]
    for s in child_sums:
        combos = [
            (chosen + (p,), semiring.mul(acc, w))
            for chosen, acc in combos
            for p, w in s.items()
        ]
    return FormalSum(
        semiring, ((Node(t.op, chosen), w) for chosen, w in combos)
    )
