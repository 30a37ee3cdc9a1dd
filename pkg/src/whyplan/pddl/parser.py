"""Recursive-descent parser for the supported PDDL subset.

Two phases: a tokenizer that keeps line/column positions, and a reader that
builds nested s-expressions which the domain/problem walkers interpret.
Anything outside STRIPS + typing + negative preconditions + action costs is
rejected with a structured `UnsupportedFeature`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import PddlSyntaxError, UnsupportedFeature
from .model import (
    ROOT_TYPE,
    SUPPORTED_REQUIREMENTS,
    ActionSchema,
    Atom,
    DomainModel,
    Predicate,
    ProblemModel,
    TypeHierarchy,
)

COST_FLUENT = "total-cost"

_NAME_RE = re.compile(r"[?:]?[a-z0-9_=<>+*/.-][a-z0-9_=<>+*/.-]*")

_REJECTED_REQUIREMENTS = {
    ":durative-actions": "durative-actions",
    ":probabilistic-effects": "probabilistic-effects",
    ":adl": "adl",
    ":conditional-effects": "conditional-effects",
    ":universal-preconditions": "universal-preconditions",
    ":existential-preconditions": "existential-preconditions",
    ":quantified-preconditions": "quantified-preconditions",
    ":disjunctive-preconditions": "disjunctive-preconditions",
    ":derived-predicates": "derived-predicates",
    ":fluents": "fluents",
    ":numeric-fluents": "numeric-fluents",
    ":equality": "equality",
    ":constraints": "constraints",
    ":preferences": "preferences",
    ":duration-inequalities": "duration-inequalities",
    ":timed-initial-literals": "timed-initial-literals",
}


@dataclass
class Token:
    text: str
    line: int
    col: int


@dataclass
class Sexp:
    items: list
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append(Token(ch, line, col))
            i += 1
            col += 1
        else:
            m = _NAME_RE.match(text.lower(), i)
            if not m:
                raise PddlSyntaxError(line, col, "a name, '(' or ')'", ch)
            tokens.append(Token(m.group(0), line, col))
            col += m.end() - i
            i = m.end()
    return tokens


def _read(tokens: list[Token], pos: int) -> tuple[Sexp | Token, int]:
    if pos >= len(tokens):
        last = tokens[-1] if tokens else Token("", 1, 1)
        raise PddlSyntaxError(last.line, last.col, "more input", "end of file")
    tok = tokens[pos]
    if tok.text == "(":
        items = []
        pos += 1
        while True:
            if pos >= len(tokens):
                raise PddlSyntaxError(tok.line, tok.col, "matching ')'", "end of file")
            if tokens[pos].text == ")":
                return Sexp(items, tok.line, tok.col), pos + 1
            node, pos = _read(tokens, pos)
            items.append(node)
    if tok.text == ")":
        raise PddlSyntaxError(tok.line, tok.col, "an expression", ")")
    return tok, pos + 1


def _read_single(text: str) -> Sexp:
    tokens = tokenize(text)
    if not tokens:
        raise PddlSyntaxError(1, 1, "a PDDL definition", "empty input")
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        extra = tokens[pos]
        raise PddlSyntaxError(extra.line, extra.col, "end of file", extra.text)
    if not isinstance(node, Sexp):
        raise PddlSyntaxError(node.line, node.col, "a parenthesised definition", node.text)
    return node


def _name(node, what: str) -> str:
    if not isinstance(node, Token):
        raise PddlSyntaxError(node.line, node.col, what, "a list")
    return node.text


def _head(sexp: Sexp) -> str:
    if not sexp.items or not isinstance(sexp.items[0], Token):
        raise PddlSyntaxError(sexp.line, sexp.col, "a section keyword")
    return sexp.items[0].text


def _typed_list(nodes: list, what: str) -> list[tuple[str, str]]:
    """Parse ``a b - t c d`` groups; untyped trailing names get type object."""
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(nodes):
        name = _name(nodes[i], what)
        if name == "-":
            if i + 1 >= len(nodes):
                raise PddlSyntaxError(nodes[i].line, nodes[i].col, "a type name", "end of list")
            t = _name(nodes[i + 1], "a type name")
            if t.startswith("("):
                raise UnsupportedFeature("either-types")
            out.extend((p, t) for p in pending)
            pending = []
            i += 2
        else:
            if isinstance(nodes[i], Sexp):
                raise UnsupportedFeature("either-types")
            pending.append(name)
            i += 1
    out.extend((p, ROOT_TYPE) for p in pending)
    return out


def _atom(sexp, allow_vars: bool) -> Atom:
    if not isinstance(sexp, Sexp):
        raise PddlSyntaxError(sexp.line, sexp.col, "a parenthesised atom", sexp.text)
    if not sexp.items:
        raise PddlSyntaxError(sexp.line, sexp.col, "a predicate name", "()")
    pred = _name(sexp.items[0], "a predicate name")
    args = []
    for node in sexp.items[1:]:
        a = _name(node, "an argument")
        if a.startswith("?") and not allow_vars:
            raise PddlSyntaxError(node.line, node.col, "a ground argument", a)
        args.append(a)
    return Atom(pred, tuple(args))


def _number(node) -> Fraction:
    text = _name(node, "a number")
    try:
        return Fraction(text)
    except ValueError:
        raise PddlSyntaxError(node.line, node.col, "a number", text) from None


def _parse_cost_effect(sexp: Sexp) -> Fraction:
    # (increase (total-cost) <number>)
    if len(sexp.items) != 3:
        raise PddlSyntaxError(sexp.line, sexp.col, "(increase (total-cost) <n>)")
    target = sexp.items[1]
    if not (isinstance(target, Sexp) and len(target.items) == 1 and _name(target.items[0], "a fluent") == COST_FLUENT):
        raise UnsupportedFeature("numeric-fluents")
    value = _number(sexp.items[2])
    if value < 0:
        raise PddlSyntaxError(sexp.line, sexp.col, "a nonnegative cost", str(value))
    return value


def _flatten_condition(sexp, pos: list[Atom], neg: list[Atom]) -> None:
    if not isinstance(sexp, Sexp) or not sexp.items:
        raise PddlSyntaxError(getattr(sexp, "line", 0), getattr(sexp, "col", 0), "a condition")
    head = sexp.items[0]
    name = head.text if isinstance(head, Token) else ""
    if name == "and":
        for item in sexp.items[1:]:
            _flatten_condition(item, pos, neg)
    elif name == "not":
        if len(sexp.items) != 2:
            raise PddlSyntaxError(sexp.line, sexp.col, "(not <atom>)")
        neg.append(_atom(sexp.items[1], allow_vars=True))
    elif name in ("or", "imply"):
        raise UnsupportedFeature("disjunctive-preconditions")
    elif name in ("forall", "exists"):
        raise UnsupportedFeature("quantified-conditions")
    elif name == "when":
        raise UnsupportedFeature("conditional-effects")
    elif name == "=":
        raise UnsupportedFeature("equality")
    elif name in ("increase", "decrease", "assign", "scale-up", "scale-down", "<", ">", "<=", ">="):
        raise UnsupportedFeature("numeric-fluents")
    else:
        pos.append(_atom(sexp, allow_vars=True))


def _parse_effects(sexp, uses_costs: bool) -> tuple[list[Atom], list[Atom], Fraction | None]:
    add: list[Atom] = []
    delete: list[Atom] = []
    cost: Fraction | None = None

    def walk(node):
        nonlocal cost
        if not isinstance(node, Sexp) or not node.items:
            raise PddlSyntaxError(getattr(node, "line", 0), getattr(node, "col", 0), "an effect")
        head = node.items[0]
        name = head.text if isinstance(head, Token) else ""
        if name == "and":
            for item in node.items[1:]:
                walk(item)
        elif name == "not":
            if len(node.items) != 2:
                raise PddlSyntaxError(node.line, node.col, "(not <atom>)")
            delete.append(_atom(node.items[1], allow_vars=True))
        elif name == "increase":
            if not uses_costs:
                raise PddlSyntaxError(node.line, node.col, "the :action-costs requirement before cost effects")
            if cost is not None:
                raise PddlSyntaxError(node.line, node.col, "at most one cost effect")
            cost = _parse_cost_effect(node)
        elif name == "when":
            raise UnsupportedFeature("conditional-effects")
        elif name in ("forall", "exists"):
            raise UnsupportedFeature("quantified-effects")
        elif name in ("decrease", "assign", "scale-up", "scale-down"):
            raise UnsupportedFeature("numeric-fluents")
        else:
            add.append(_atom(node, allow_vars=True))

    walk(sexp)
    return add, delete, cost


def _parse_requirements(sexp: Sexp) -> tuple[str, ...]:
    reqs = []
    for node in sexp.items[1:]:
        r = _name(node, "a requirement flag")
        if r in SUPPORTED_REQUIREMENTS:
            reqs.append(r)
        elif r in _REJECTED_REQUIREMENTS:
            raise UnsupportedFeature(_REJECTED_REQUIREMENTS[r])
        else:
            raise UnsupportedFeature(r.lstrip(":"))
    return tuple(reqs)


def _parse_action(sexp: Sexp, uses_costs: bool) -> ActionSchema:
    name = _name(sexp.items[1], "an action name")
    params: list[tuple[str, str]] = []
    pre_pos: list[Atom] = []
    pre_neg: list[Atom] = []
    add: list[Atom] = []
    delete: list[Atom] = []
    cost: Fraction | None = None
    i = 2
    while i < len(sexp.items):
        key = _name(sexp.items[i], "an action section (:parameters/:precondition/:effect)")
        if i + 1 >= len(sexp.items):
            raise PddlSyntaxError(sexp.line, sexp.col, f"a body after {key}")
        body = sexp.items[i + 1]
        if key == ":parameters":
            if not isinstance(body, Sexp):
                raise PddlSyntaxError(body.line, body.col, "a parameter list")
            params = _typed_list(body.items, "a parameter")
            for v, _ in params:
                if not v.startswith("?"):
                    raise PddlSyntaxError(body.line, body.col, "a ?variable parameter", v)
        elif key == ":precondition":
            _flatten_condition(body, pre_pos, pre_neg)
        elif key == ":effect":
            add, delete, cost = _parse_effects(body, uses_costs)
        elif key == ":duration":
            raise UnsupportedFeature("durative-actions")
        else:
            raise PddlSyntaxError(sexp.line, sexp.col, "a supported action section", key)
        i += 2
    return ActionSchema(
        name=name,
        parameters=tuple(params),
        pre_pos=tuple(pre_pos),
        pre_neg=tuple(pre_neg),
        add=tuple(add),
        delete=tuple(delete),
        cost=cost if cost is not None else Fraction(1),
    )


def parse_domain(text: str) -> DomainModel:
    """Parse a domain definition; raises on anything outside the subset."""
    root = _read_single(text)
    if _head(root) != "define":
        raise PddlSyntaxError(root.line, root.col, "(define ...)", _head(root))
    header = root.items[1] if len(root.items) > 1 else None
    if not (isinstance(header, Sexp) and _head(header) == "domain" and len(header.items) == 2):
        raise PddlSyntaxError(root.line, root.col, "(domain <name>)")
    name = _name(header.items[1], "a domain name")

    types = TypeHierarchy()
    predicates: list[Predicate] = []
    schemas: list[ActionSchema] = []
    constants: list[tuple[str, str]] = []
    requirements: tuple[str, ...] = ()

    for section in root.items[2:]:
        if not isinstance(section, Sexp):
            raise PddlSyntaxError(section.line, section.col, "a domain section", section.text)
        head = _head(section)
        if head == ":requirements":
            requirements = _parse_requirements(section)
        elif head == ":types":
            for child, parent in _typed_list(section.items[1:], "a type name"):
                types.declare(child, parent)
        elif head == ":constants":
            constants.extend(_typed_list(section.items[1:], "a constant"))
        elif head == ":predicates":
            for node in section.items[1:]:
                if not isinstance(node, Sexp) or not node.items:
                    raise PddlSyntaxError(section.line, section.col, "a predicate declaration")
                pname = _name(node.items[0], "a predicate name")
                params = _typed_list(node.items[1:], "a predicate parameter")
                predicates.append(Predicate(pname, tuple(params)))
        elif head == ":functions":
            for node in section.items[1:]:
                ok = isinstance(node, Sexp) and len(node.items) == 1 and _name(node.items[0], "a fluent") == COST_FLUENT
                if not ok:
                    raise UnsupportedFeature("numeric-fluents")
        elif head == ":action":
            schemas.append(_parse_action(section, ":action-costs" in requirements))
        elif head == ":durative-action":
            raise UnsupportedFeature("durative-actions")
        elif head == ":derived":
            raise UnsupportedFeature("derived-predicates")
        else:
            raise UnsupportedFeature(head.lstrip(":"))

    domain = DomainModel(
        name=name,
        types=types,
        predicates=tuple(predicates),
        schemas=tuple(schemas),
        constants=tuple(constants),
        uses_costs=":action-costs" in requirements,
        requirements=requirements,
    )
    domain.validate()
    return domain


def parse_problem(text: str, domain: DomainModel) -> ProblemModel:
    """Parse a problem and type-check it against the already-parsed domain."""
    root = _read_single(text)
    if _head(root) != "define":
        raise PddlSyntaxError(root.line, root.col, "(define ...)", _head(root))
    header = root.items[1] if len(root.items) > 1 else None
    if not (isinstance(header, Sexp) and _head(header) == "problem" and len(header.items) == 2):
        raise PddlSyntaxError(root.line, root.col, "(problem <name>)")
    name = _name(header.items[1], "a problem name")

    domain_name = ""
    objects: list[tuple[str, str]] = []
    init: set[Atom] = set()
    goal_pos: set[Atom] = set()
    goal_neg: set[Atom] = set()
    metric: str | None = None

    for section in root.items[2:]:
        if not isinstance(section, Sexp):
            raise PddlSyntaxError(section.line, section.col, "a problem section", section.text)
        head = _head(section)
        if head == ":domain":
            domain_name = _name(section.items[1], "a domain name")
        elif head == ":objects":
            objects.extend(_typed_list(section.items[1:], "an object"))
        elif head == ":init":
            for node in section.items[1:]:
                if isinstance(node, Sexp) and node.items and isinstance(node.items[0], Token):
                    h = node.items[0].text
                    if h == "=":
                        # only (= (total-cost) 0) is tolerated, as inert syntax
                        target = node.items[1] if len(node.items) == 3 else None
                        if not (
                            isinstance(target, Sexp)
                            and len(target.items) == 1
                            and _name(target.items[0], "a fluent") == COST_FLUENT
                        ):
                            raise UnsupportedFeature("numeric-fluents")
                        continue
                    if h == "not":
                        raise UnsupportedFeature("negative-init-literals")
                    if h == "at" and len(node.items) == 3 and isinstance(node.items[1], Token) and node.items[1].text.replace(".", "").isdigit():
                        raise UnsupportedFeature("timed-initial-literals")
                init.add(_atom(node, allow_vars=False))
        elif head == ":goal":
            if len(section.items) != 2:
                raise PddlSyntaxError(section.line, section.col, "a single goal formula")
            pos: list[Atom] = []
            neg: list[Atom] = []
            _flatten_condition(section.items[1], pos, neg)
            for a in pos + neg:
                for arg in a.args:
                    if arg.startswith("?"):
                        raise PddlSyntaxError(section.line, section.col, "a ground goal literal", str(a))
            goal_pos.update(pos)
            goal_neg.update(neg)
        elif head == ":metric":
            if len(section.items) != 3:
                raise UnsupportedFeature("metric")
            direction = _name(section.items[1], "minimize")
            target = section.items[2]
            ok = (
                direction == "minimize"
                and isinstance(target, Sexp)
                and len(target.items) == 1
                and _name(target.items[0], "a fluent") == COST_FLUENT
            )
            if not ok:
                raise UnsupportedFeature("metric")
            metric = COST_FLUENT
        else:
            raise UnsupportedFeature(head.lstrip(":"))

    problem = ProblemModel(
        name=name,
        domain_name=domain_name,
        objects=tuple(objects),
        init=frozenset(init),
        goal_pos=frozenset(goal_pos),
        goal_neg=frozenset(goal_neg),
        metric=metric,
    )
    problem.validate(domain)
    return problem
