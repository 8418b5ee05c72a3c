"""A total order on the payloads that appear inside formal sums.

Used wherever output must be deterministic: JSON rendering, witness reports,
first-difference selection. Structured payloads provide ``_canon_key``;
primitives are handled here. Keys are tuples and compare without surprises.
"""

from __future__ import annotations

from fractions import Fraction

from .semiring import INF


def payload_key(x):
    if hasattr(x, "_canon_key"):
        return x._canon_key()
    if isinstance(x, str):
        return ("str", x)
    if x is INF:
        return ("num", 1, 0)
    if isinstance(x, bool):
        return ("num", 0, Fraction(int(x)))
    if isinstance(x, (int, Fraction)):
        return ("num", 0, Fraction(x))
    if isinstance(x, tuple):
        # tuples of labels are trace words: order length-major, then letters
        return ("tuple", len(x), tuple(payload_key(i) for i in x))
    if x is None:
        return ("none",)
    raise TypeError(f"no canonical order for payload {x!r}")
