"""From rule specifications to distributive laws, and the affineness check.

``rho_apply`` evaluates the plain law on one operator applied to tagged
arguments (pure / one observed transition / observed termination).
``bar_rho_step`` is the composite law on behaviour-carrying arguments,
assembled literally from unit, pairing, argument distribution, rule
application and flattening, in that order. ``law_star`` is its free extension
to whole terms over behaviour-carrying leaves. ``naturality_check``
enumerates the two evaluation orders of the affineness square and reports the
first input on which they disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

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
    fs_flatten,
    fs_map,
    fs_pair_join,
    fs_unit,
)
from .ordering import payload_key
from .rulespec import TransPremise
from .terms import Leaf, Node, Var, graft, map_leaves, substitute


def _decompose(args):
    """Split argument positions into observed-step, observed-stop and pure."""
    steps = {}
    stops = set()
    pures = {}
    for i, arg in enumerate(args, start=1):
        if isinstance(arg, Pure):
            pures[i] = arg.value
        elif isinstance(arg, Obs):
            if arg.elem is STOP:
                stops.add(i)
            elif isinstance(arg.elem, Step):
                steps[i] = arg.elem
            else:
                raise TypeError(f"bad observation {arg.elem!r}")
        else:
            raise TypeError(f"argument {i} is not a B0 element: {arg!r}")
    return steps, stops, pures


def _rule_matches(rule, steps, stops):
    """Premise indices and labels must match the decomposition exactly."""
    trans = rule.trans_premises()
    if len(trans) != len(steps):
        return False
    for p in trans:
        step = steps.get(p.index)
        if step is None or step.label != p.label:
            return False
    term_indices = {p.index for p in rule.term_premises()}
    return term_indices == stops


def _rule_substitution(rule, steps, pures, stops):
    subst = {}
    for i, step in steps.items():
        subst[Var("y", i)] = Leaf(step.target)
    for i, value in pures.items():
        subst[Var("x", i)] = Leaf(value)
    # stop-observed arguments have no carried value; their variables are
    # outside the allowed target vocabulary and hit UnboundVariableError
    return subst


def rho_apply(spec, op, args):
    """Evaluate the law on one operator over tagged arguments.

    Returns a formal sum of Step(label, target-term) / STOP where target
    terms carry the argument payloads in their leaves.
    """
    args = tuple(args)
    if op not in spec.signature:
        raise KeyError(f"unknown operator {op!r}")
    if len(args) != spec.signature.arity(op):
        raise ValueError(
            f"operator {op!r} expects {spec.signature.arity(op)} arguments"
        )
    sr = spec.semiring
    steps, stops, pures = _decompose(args)

    if spec.dialect == "desimone":
        # any observed termination collapses the result to the stop unit
        if stops:
            return fs_unit(sr, STOP)
        entries = [(STOP, sr.one)]
        for rule in spec.rules_for(op):
            if not _rule_matches(rule, steps, set()):
                continue
            subst = _rule_substitution(rule, steps, pures, stops)
            entries.append(
                (Step(rule.label, substitute(rule.target, subst)), sr.one)
            )
        return FormalSum(sr, entries)

    entries = []
    for rule in spec.rules_for(op):
        if not _rule_matches(rule, steps, stops):
            continue
        if rule.target is None:
            entries.append((STOP, rule.weight))
        else:
            subst = _rule_substitution(rule, steps, pures, stops)
            entries.append(
                (Step(rule.label, substitute(rule.target, subst)), rule.weight)
            )
    return FormalSum(sr, entries)


def bar_rho_step(spec, op, pairs):
    """One composite-law step on behaviour-carrying arguments.

    ``pairs`` is a list of (payload, behaviour) per argument position, the
    behaviour being a formal sum of Step/STOP over payloads. The pipeline is
    unit x id, pairing, argument distribution, rule application, flattening.
    """
    sr = spec.semiring
    arg_sums = [
        fs_pair_join(fs_unit(sr, x), behaviour, left=Pure, right=Obs)
        for x, behaviour in pairs
    ]
    combined = dist_sigma(sr, op, arg_sums)
    applied = fs_map(
        lambda flat: rho_apply(spec, flat.op, [c.payload for c in flat.children]),
        combined,
    )
    return fs_flatten(applied)


def law_star(spec, t):
    """Free extension of the composite law to terms over behaviour leaves.

    Leaves are (payload, behaviour) pairs; a leaf contributes its behaviour
    with successors wrapped as leaf terms, a node runs ``bar_rho_step`` on
    its children's recursive results and grafts the two term layers flat.
    """
    if isinstance(t, Leaf):
        x, behaviour = t.payload
        return fs_map(lambda e: belem_map(e, Leaf), behaviour)
    pairs = []
    for child in t.children:
        projected = map_leaves(child, lambda p: p[0])
        pairs.append((projected, law_star(spec, child)))
    stepped = bar_rho_step(spec, t.op, pairs)
    return fs_map(lambda e: belem_map(e, graft), stepped)


# --- the affineness square -------------------------------------------------

@dataclass
class NaturalityWitness:
    op: str
    args: tuple  # B0 elements over formal-sum payloads
    law_first: FormalSum
    args_first: FormalSum

    def describe(self):
        return {
            "op": self.op,
            "args": [_describe_arg(a) for a in self.args],
            "law_first": self.law_first,
            "args_first": self.args_first,
        }


@dataclass
class NaturalityResult:
    passed: bool
    checked: int
    carrier: tuple
    witness: NaturalityWitness | None = None


def _describe_arg(arg):
    if isinstance(arg, Pure):
        return f"pure {arg.value!r}"
    if arg.elem is STOP:
        return "stop"
    return f"step {arg.elem.label} -> {arg.elem.target!r}"


def leg_law_first(spec, op, args):
    """Apply the law over sum payloads, then distribute leaves and targets."""
    sr = spec.semiring
    applied = rho_apply(spec, op, args)
    distributed = fs_map(
        lambda e: dist_b(sr, belem_map(e, lambda t: dist_sigma_star(sr, t))),
        applied,
    )
    return fs_flatten(distributed)


def leg_args_first(spec, op, args):
    """Distribute each argument's sums first, then apply the law pointwise."""
    sr = spec.semiring
    arg_sums = [dist_b0(sr, a) for a in args]
    combined = dist_sigma(sr, op, arg_sums)
    applied = fs_map(
        lambda flat: rho_apply(spec, flat.op, [c.payload for c in flat.children]),
        combined,
    )
    return fs_flatten(applied)


def _affine_sums(spec, carrier):
    """The affine formal sums over the carrier used as argument payloads.

    Boolean: all nonempty subsets. Rational: all distributions with
    denominator dividing 4 (point masses included).
    """
    sr = spec.semiring
    if sr.name == "boolean":
        subsets = []
        n = len(carrier)
        for mask in range(1, 1 << n):
            subsets.append(
                FormalSum(sr, [(x, 1) for i, x in enumerate(carrier) if mask >> i & 1])
            )
        return subsets
    quarters = [Fraction(k, 4) for k in range(5)]
    out = []
    for weights in product(quarters, repeat=len(carrier)):
        if sum(weights) == 1:
            out.append(FormalSum(sr, zip(carrier, weights)))
    return out


def _nonaffine_extras(spec, carrier):
    """Sub-unit sums (empty included) added in include-nonaffine mode."""
    sr = spec.semiring
    if sr.name == "boolean":
        return [FormalSum(sr)]
    quarters = [Fraction(k, 4) for k in range(5)]
    out = []
    for weights in product(quarters, repeat=len(carrier)):
        if sum(weights) < 1:
            out.append(FormalSum(sr, zip(carrier, weights)))
    return out


MAX_CARRIER = 3


def naturality_check(spec, carrier_size=2, include_nonaffine=False):
    """Compare the two legs of the affineness square over a small carrier.

    Arguments range over pure affine sums, observed steps into affine sums,
    and observed termination; include_nonaffine adds empty and sub-unit sums.
    Returns the first disagreement in enumeration order, if any.
    """
    if not 1 <= carrier_size <= MAX_CARRIER:
        raise ValueError(f"carrier size must be between 1 and {MAX_CARRIER}")
    carrier = tuple(f"x{i}" for i in range(carrier_size))
    sums = _affine_sums(spec, carrier)
    if include_nonaffine:
        sums = sums + _nonaffine_extras(spec, carrier)
    sums.sort(key=payload_key)

    pool = [Pure(s) for s in sums]
    pool.extend(Obs(Step(label, s)) for label in spec.labels for s in sums)
    pool.append(Obs(STOP))

    checked = 0
    for op in spec.signature.names():
        arity = spec.signature.arity(op)
        for args in product(pool, repeat=arity):
            checked += 1
            left = leg_law_first(spec, op, args)
            right = leg_args_first(spec, op, args)
            if left != right:
                return NaturalityResult(
                    passed=False,
                    checked=checked,
                    carrier=carrier,
                    witness=NaturalityWitness(op, args, left, right),
                )
    return NaturalityResult(passed=True, checked=checked, carrier=carrier)
