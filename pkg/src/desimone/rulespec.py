"""Rule-specification DSL: parsing, forall-expansion, and format validation.

A spec file is line-oriented:

    # comment
    dialect desimone | weighted
    semiring boolean | rational
    labels a, b
    op par : 2
    rule par(x1, x2) -@l-> par(y1, x2) when x1 -@l-> y1 forall @l
    rule par(x1, x2) -[1/2]-> * when x1 -> *

Premises are ``xi -LBL-> yi`` (transition) or ``xj -> *`` (termination,
weighted dialect only). A conclusion is ``-LBL->`` / ``-LBL[W]->`` with a term
target, or ``-[W]-> *`` (termination). ``@name`` metavariables range over the
declared labels and must be bound by the ``forall`` clause.

Parsing enforces structural sanity (declared names, arities, head shape);
``validate_format`` reports rule-format violations as data without blocking
evaluation, so deliberately ill-formed specs can still be run against the
checkers.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .semiring import INF, SEMIRINGS
from .terms import (
    Leaf,
    Node,
    Signature,
    Var,
    is_affine_term,
    print_term,
    term_vars,
)


class SpecParseError(ValueError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}"
            if col is not None:
                where += f", column {col}"
            where += ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class TransPremise:
    """x_index --label--> y_index (successor index equals source index)."""

    index: int
    label: str

    def show(self):
        return f"x{self.index} -{self.label}-> y{self.index}"


@dataclass(frozen=True)
class TermPremise:
    """x_index --> * : the argument terminates."""

    index: int

    def show(self):
        return f"x{self.index} -> *"


@dataclass(frozen=True)
class Rule:
    """A ground rule. ``target is None`` means a termination conclusion."""

    op: str
    arity: int
    premises: tuple
    label: object  # str, or None for termination conclusions
    weight: object
    target: object  # Term, or None for termination conclusions
    line: int = field(default=0, compare=False)

    def trans_premises(self):
        return [p for p in self.premises if isinstance(p, TransPremise)]

    def term_premises(self):
        return [p for p in self.premises if isinstance(p, TermPremise)]

    def show(self, semiring=None):
        head = self.op
        if self.arity:
            head += "(" + ", ".join(f"x{i}" for i in range(1, self.arity + 1)) + ")"
        w = ""
        if semiring is not None:
            w = f"[{semiring.show(self.weight)}]"
        if self.target is None:
            arrow = f"-{w}->" if w else "->"
            concl = f"{head} {arrow} *"
        else:
            label = self.label if self.label is not None else ""
            concl = f"{head} -{label}{w}-> {print_term(self.target)}"
        if self.premises:
            concl += " when " + ", ".join(p.show() for p in self.premises)
        return concl


@dataclass(frozen=True)
class RuleSchema:
    """A rule as written, before metavariable expansion."""

    op: str
    arity: int
    premises: tuple
    label: object
    weight: object
    target: object
    forall: tuple
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Violation:
    rule: str
    condition: str
    fragment: str
    severity: str = "error"
    line: int = 0


class RuleSpec:
    """A parsed specification: dialect, semiring, labels, signature, ground rules."""

    def __init__(self, dialect, semiring, labels, signature, rules, source=""):
        self.dialect = dialect
        self.semiring = semiring
        self.labels = tuple(labels)
        self.signature = signature
        self.rules = tuple(rules)
        self.source = source
        self._by_op = {}
        for r in self.rules:
            self._by_op.setdefault(r.op, []).append(r)

    def rules_for(self, op):
        return self._by_op.get(op, [])

    def __repr__(self):
        return (
            f"RuleSpec({self.dialect}/{self.semiring.name}, "
            f"{len(self.signature.ops)} ops, {len(self.rules)} rules)"
        )


_IDENT = re.compile(r"[A-Za-z_]\w*")
_VAR = re.compile(r"^([xy])([0-9]+)$")

_TOKEN_SPEC = [
    ("arrow", re.compile(r"-(?:(@?[A-Za-z_]\w*))?(?:\[([^\[\]]*)\])?->|->")),
    ("metavar", re.compile(r"@[A-Za-z_]\w*")),
    ("ident", re.compile(r"[A-Za-z_]\w*")),
    ("number", re.compile(r"[0-9]+")),
    ("lparen", re.compile(r"\(")),
    ("rparen", re.compile(r"\)")),
    ("comma", re.compile(r",")),
    ("star", re.compile(r"\*")),
    ("colon", re.compile(r":")),
]


def _tokenize(line_text, line_no):
    pos = 0
    out = []
    while pos < len(line_text):
        if line_text[pos].isspace():
            pos += 1
            continue
        for kind, rx in _TOKEN_SPEC:
            m = rx.match(line_text, pos)
            if m:
                if kind == "arrow":
                    label = m.group(1) if m.lastindex else None
                    weight = m.group(2) if m.lastindex and m.lastindex >= 2 else None
                    out.append(("arrow", (label, weight), pos + 1))
                else:
                    out.append((kind, m.group(0), pos + 1))
                pos = m.end()
                break
        else:
            raise SpecParseError(
                f"unexpected character {line_text[pos]!r}", line_no, pos + 1
            )
    return out


class _RuleParser:
    """Recursive descent over one tokenized ``rule`` line."""

    def __init__(self, tokens, line_no, signature, labels, semiring, dialect):
        self.toks = tokens
        self.pos = 0
        self.line = line_no
        self.signature = signature
        self.labels = labels
        self.semiring = semiring
        self.dialect = dialect

    def error(self, msg, col=None):
        if col is None:
            col = self.toks[self.pos][2] if self.pos < len(self.toks) else None
        raise SpecParseError(msg, self.line, col)

    def peek(self, kind=None, value=None):
        if self.pos >= len(self.toks):
            return None
        k, v, _ = self.toks[self.pos]
        if kind is not None and k != kind:
            return None
        if value is not None and v != value:
            return None
        return self.toks[self.pos]

    def take(self, kind, what):
        tok = self.peek(kind)
        if tok is None:
            got = self.toks[self.pos][1] if self.pos < len(self.toks) else "end of line"
            self.error(f"expected {what}, got {got!r}")
        self.pos += 1
        return tok

    def at_keyword(self, word):
        tok = self.peek("ident", word)
        return tok is not None

    def parse_var(self, want_kind=None):
        tok = self.take("ident", "a variable")
        m = _VAR.match(tok[1])
        if not m:
            self.error(f"expected a variable, got {tok[1]!r}", tok[2])
        v = Var(m.group(1), int(m.group(2)))
        if want_kind and v.kind != want_kind:
            self.error(f"expected an {want_kind}-variable, got {v.name}", tok[2])
        return v

    def parse_label(self, allow_metavar=True):
        tok = self.peek("metavar") or self.peek("ident")
        if tok is None:
            self.error("expected a label")
        self.pos += 1
        name = tok[1]
        if name.startswith("@"):
            if not allow_metavar:
                self.error(f"metavariable {name} not allowed here", tok[2])
            return name
        if name not in self.labels:
            self.error(f"undeclared label {name!r}", tok[2])
        return name

    def parse_term(self):
        tok = self.take("ident", "a term")
        name = tok[1]
        m = _VAR.match(name)
        if m:
            if self.peek("lparen"):
                self.error(f"variable {name} cannot take arguments", tok[2])
            return Leaf(Var(m.group(1), int(m.group(2))))
        if name not in self.signature:
            self.error(f"unknown operator {name!r}", tok[2])
        children = []
        if self.peek("lparen"):
            self.pos += 1
            if self.peek("rparen"):
                self.pos += 1
            else:
                while True:
                    children.append(self.parse_term())
                    if self.peek("rparen"):
                        self.pos += 1
                        break
                    self.take("comma", "',' or ')'")
        if len(children) != self.signature.arity(name):
            self.error(
                f"operator {name!r} expects {self.signature.arity(name)} "
                f"arguments, got {len(children)}",
                tok[2],
            )
        return Node(name, children)

    def parse_weight(self, text, col):
        if text is None or text.strip() == "":
            self.error("missing weight", col)
        try:
            return self.semiring.parse(text)
        except ValueError as exc:
            self.error(str(exc), col)

    def parse_conclusion_arrow(self):
        tok = self.take("arrow", "an arrow")
        label, weight_text = tok[1]
        col = tok[2]
        if label is not None and label.startswith("@"):
            pass
        elif label is not None and label not in self.labels:
            self.error(f"undeclared label {label!r}", col)
        if self.dialect == "desimone":
            if weight_text is not None:
                self.error("weights are not part of the desimone dialect", col)
            weight = self.semiring.one
        else:
            weight = self.parse_weight(weight_text, col)
        return label, weight, col

    def parse_premise(self):
        source = self.parse_var("x")
        tok = self.take("arrow", "a premise arrow")
        label, weight_text = tok[1]
        if weight_text is not None:
            self.error("premises carry no weight", tok[2])
        if label is None:
            star = self.take("star", "'*'")
            return TermPremise(source.index), star
        if not label.startswith("@") and label not in self.labels:
            self.error(f"undeclared label {label!r}", tok[2])
        target = self.parse_var("y")
        if target.index != source.index:
            self.error(
                f"premise successor must be y{source.index} to match x{source.index}"
            )
        return TransPremise(source.index, label), None

    def parse(self):
        head_tok = self.take("ident", "an operator")
        op = head_tok[1]
        if op not in self.signature:
            self.error(f"unknown operator {op!r}", head_tok[2])
        arity = self.signature.arity(op)
        seen = []
        if self.peek("lparen"):
            self.pos += 1
            if self.peek("rparen"):
                self.pos += 1
            else:
                while True:
                    seen.append(self.parse_var("x"))
                    if self.peek("rparen"):
                        self.pos += 1
                        break
                    self.take("comma", "',' or ')'")
        expected = [Var("x", i) for i in range(1, arity + 1)]
        if seen != expected:
            want = ", ".join(v.name for v in expected) or "()"
            self.error(f"rule head for {op!r} must list exactly ({want})", head_tok[2])

        label, weight, arrow_col = self.parse_conclusion_arrow()
        if self.peek("star"):
            self.pos += 1
            target = None
        else:
            if label is None:
                self.error("a term target needs a labelled arrow", arrow_col)
            target = self.parse_term()

        premises = []
        if self.at_keyword("when"):
            self.pos += 1
            while True:
                premise, _ = self.parse_premise()
                premises.append(premise)
                if self.peek("comma"):
                    self.pos += 1
                    continue
                break

        forall = []
        if self.at_keyword("forall"):
            self.pos += 1
            while True:
                tok = self.take("metavar", "a metavariable")
                if tok[1] in forall:
                    self.error(f"metavariable {tok[1]} listed twice", tok[2])
                forall.append(tok[1])
                if self.peek("comma"):
                    self.pos += 1
                    continue
                break

        if self.pos != len(self.toks):
            self.error(f"trailing input {self.toks[self.pos][1]!r}")

        used = {p.label for p in premises if isinstance(p, TransPremise)}
        if label is not None:
            used.add(label)
        used = {m for m in used if isinstance(m, str) and m.startswith("@")}
        unbound = sorted(used - set(forall))
        if unbound:
            self.error(f"unbound metavariable {unbound[0]}", arrow_col)
        unused = sorted(set(forall) - used)
        if unused:
            self.error(f"metavariable {unused[0]} bound but never used", arrow_col)

        return RuleSchema(
            op=op,
            arity=arity,
            premises=tuple(premises),
            label=label,
            weight=weight,
            target=target,
            forall=tuple(forall),
            line=self.line,
        )


def expand_forall(schema, labels):
    """Ground a schema: metavariables range independently over the labels."""
    if not schema.forall:
        assignments = [{}]
    else:
        assignments = [
            dict(zip(schema.forall, combo))
            for combo in itertools.product(labels, repeat=len(schema.forall))
        ]

    def ground_label(lbl, asg):
        if isinstance(lbl, str) and lbl.startswith("@"):
            return asg[lbl]
        return lbl

    out = []
    for asg in assignments:
        premises = tuple(
            TransPremise(p.index, ground_label(p.label, asg))
            if isinstance(p, TransPremise)
            else p
            for p in schema.premises
        )
        out.append(
            Rule(
                op=schema.op,
                arity=schema.arity,
                premises=_canonical_premises(premises),
                label=ground_label(schema.label, asg),
                weight=schema.weight,
                target=schema.target,
                line=schema.line,
            )
        )
    return out


def _canonical_premises(premises):
    def key(p):
        if isinstance(p, TransPremise):
            return (p.index, 0, p.label)
        return (p.index, 1, "")

    return tuple(sorted(premises, key=key))


def _merge_rules(rules, semiring, dialect):
    """Duplicate rules merge: additively in weighted mode, idempotently in boolean."""
    merged = {}
    order = []
    for r in rules:
        key = (r.op, r.premises, r.label, r.target)
        if key not in merged:
            merged[key] = r
            order.append(key)
        elif dialect == "weighted":
            old = merged[key]
            merged[key] = Rule(
                op=old.op,
                arity=old.arity,
                premises=old.premises,
                label=old.label,
                weight=semiring.add(old.weight, r.weight),
                target=old.target,
                line=old.line,
            )
        # desimone: boolean weights, duplicates collapse
    return [merged[k] for k in order]


def parse_spec(text):
    lines = text.splitlines()
    dialect = None
    semiring = None
    labels = []
    ops = []
    schemas = []
    signature = None

    def strip_comment(s):
        i = s.find("#")
        return s if i < 0 else s[:i]

    for line_no, raw in enumerate(lines, start=1):
        line = strip_comment(raw).strip()
        if not line:
            continue
        word = line.split(None, 1)[0]
        rest = line[len(word):].strip()

        if word == "dialect":
            if dialect is not None:
                raise SpecParseError("dialect declared twice", line_no)
            if rest not in ("desimone", "weighted"):
                raise SpecParseError(f"unknown dialect {rest!r}", line_no)
            dialect = rest
        elif word == "semiring":
            if dialect is None:
                raise SpecParseError("dialect must be declared first", line_no)
            if semiring is not None:
                raise SpecParseError("semiring declared twice", line_no)
            if rest not in SEMIRINGS:
                raise SpecParseError(f"unknown semiring {rest!r}", line_no)
            if dialect == "desimone" and rest != "boolean":
                raise SpecParseError(
                    "desimone dialect requires the boolean semiring", line_no
                )
            semiring = SEMIRINGS[rest]
        elif word == "labels":
            if semiring is None:
                raise SpecParseError("labels must follow the header", line_no)
            for name in [s.strip() for s in rest.split(",")]:
                if not name or not _IDENT.fullmatch(name):
                    raise SpecParseError(f"bad label name {name!r}", line_no)
                if name in labels:
                    raise SpecParseError(f"label {name!r} declared twice", line_no)
                labels.append(name)
        elif word == "op":
            if semiring is None:
                raise SpecParseError("op declarations must follow the header", line_no)
            toks = _tokenize(rest, line_no)
            shape = [t[0] for t in toks]
            if shape != ["ident", "colon", "number"]:
                raise SpecParseError("expected 'op name : arity'", line_no)
            name, arity = toks[0][1], int(toks[2][1])
            if _VAR.match(name):
                raise SpecParseError(
                    f"operator name {name!r} collides with variable syntax", line_no
                )
            if any(name == n for n, _ in ops):
                raise SpecParseError(f"operator {name!r} declared twice", line_no)
            ops.append((name, arity))
            signature = None
        elif word == "rule":
            if semiring is None:
                raise SpecParseError("rules must follow the header", line_no)
            if signature is None:
                signature = Signature(ops)
            parser = _RuleParser(
                _tokenize(rest, line_no), line_no, signature, labels, semiring, dialect
            )
            schemas.append(parser.parse())
        else:
            raise SpecParseError(f"unknown declaration {word!r}", line_no)

    if dialect is None:
        raise SpecParseError("missing dialect declaration")
    if semiring is None:
        raise SpecParseError("missing semiring declaration")
    if not labels:
        raise SpecParseError("missing labels declaration")
    if signature is None:
        signature = Signature(ops)

    ground = []
    for schema in schemas:
        ground.extend(expand_forall(schema, labels))
    ground = _merge_rules(ground, semiring, dialect)
    return RuleSpec(dialect, semiring, labels, signature, ground, source=text)


# --- format validation -----------------------------------------------------

def validate_format(spec):
    """Check every ground rule against the rule-format conditions.

    Returns a list of Violations; severity "error" marks a rule outside the
    format (the evaluation pipeline still runs on such specs, which is what
    makes the format counterexamples observable), severity "warning" flags
    legal but suspicious corners.
    """
    out = []

    def flag(rule, condition, fragment, severity="error"):
        out.append(
            Violation(
                rule=rule.show(spec.semiring if spec.dialect == "weighted" else None),
                condition=condition,
                fragment=fragment,
                severity=severity,
                line=rule.line,
            )
        )

    for rule in spec.rules:
        premise_indices = [p.index for p in rule.premises]
        if len(set(premise_indices)) != len(premise_indices):
            dup = sorted(
                i for i in set(premise_indices) if premise_indices.count(i) > 1
            )
            flag(rule, "distinct-premise-sources", f"x{dup[0]} premised twice")
        for p in rule.premises:
            if not 1 <= p.index <= rule.arity:
                flag(rule, "premise-source-range", f"x{p.index} out of range")
        if spec.dialect == "desimone":
            for p in rule.term_premises():
                flag(rule, "dialect-term-premise", p.show())
            if rule.target is None and rule.label is None:
                flag(rule, "dialect-termination", "conclusion '-> *'")
        if rule.target is None and rule.label is not None:
            flag(
                rule,
                "labelled-termination",
                f"label {rule.label!r} on a termination conclusion",
            )
        if rule.target is not None:
            if not is_affine_term(rule.target):
                seen, dup = set(), None
                for v in term_vars(rule.target):
                    if v in seen:
                        dup = v
                        break
                    seen.add(v)
                flag(
                    rule,
                    "affine-target",
                    f"variable {dup.name} occurs twice in {print_term(rule.target)}",
                )
            trans_indices = {p.index for p in rule.trans_premises()}
            for v in set(term_vars(rule.target)):
                if v.kind == "y":
                    if v.index not in trans_indices:
                        flag(
                            rule,
                            "target-vars",
                            f"{v.name} has no matching transition premise",
                        )
                else:
                    if not 1 <= v.index <= rule.arity:
                        flag(rule, "target-vars", f"{v.name} out of range")
                    elif v.index in premise_indices:
                        flag(
                            rule,
                            "target-vars",
                            f"{v.name} is premised and may not be copied into the target",
                        )
        if spec.dialect == "weighted" and rule.weight is INF:
            flag(rule, "weight-inf", "infinite rule weight", severity="warning")
    return out


def format_errors(spec):
    return [v for v in validate_format(spec) if v.severity == "error"]
