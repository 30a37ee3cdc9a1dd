"""Typed in-memory model of the supported PDDL subset.

The subset is STRIPS + typing + negative preconditions + one additive
action-cost fluent (``total-cost``). Models are treated as immutable once
built; all structural pieces are hashable value types so they can be shared
freely between concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import NamedTuple

from ..errors import (
    DomainMismatch,
    PddlSyntaxError,
    TypeMismatch,
    UnknownObject,
    UnknownPredicate,
    UnknownType,
)

ROOT_TYPE = "object"

SUPPORTED_REQUIREMENTS = (
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":action-costs",
)


class Atom(NamedTuple):
    """A predicate applied to arguments (variables ``?x`` or object names)."""

    pred: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        if self.args:
            return "(" + self.pred + " " + " ".join(self.args) + ")"
        return "(" + self.pred + ")"

    def substitute(self, binding: dict[str, str]) -> "Atom":
        return Atom(self.pred, tuple(binding.get(a, a) for a in self.args))

    @staticmethod
    def parse(text: str) -> "Atom":
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise PddlSyntaxError(1, 1, "a parenthesised atom", text)
        parts = body[1:-1].split()
        if not parts:
            raise PddlSyntaxError(1, 1, "a predicate name", text)
        return Atom(parts[0].lower(), tuple(p.lower() for p in parts[1:]))


@dataclass
class TypeHierarchy:
    """Forest of type names rooted at the universal type ``object``."""

    parents: dict[str, str] = field(default_factory=dict)

    def declare(self, name: str, parent: str = ROOT_TYPE) -> None:
        self.parents[name] = parent

    def __contains__(self, name: str) -> bool:
        return name == ROOT_TYPE or name in self.parents

    def is_subtype(self, name: str, ancestor: str) -> bool:
        """True when every object of type `name` is also of type `ancestor`."""
        if ancestor == ROOT_TYPE:
            return True
        cur = name
        seen = set()
        while cur != ROOT_TYPE and cur not in seen:
            if cur == ancestor:
                return True
            seen.add(cur)
            cur = self.parents.get(cur, ROOT_TYPE)
        return cur == ancestor

    def check_forest(self) -> None:
        for name in self.parents:
            cur = name
            seen = set()
            while cur != ROOT_TYPE:
                if cur in seen:
                    raise PddlSyntaxError(0, 0, "an acyclic type hierarchy", name)
                seen.add(cur)
                if cur not in self.parents:
                    raise UnknownType(cur)
                cur = self.parents[cur]

    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self.parents))


@dataclass
class Predicate:
    name: str
    params: tuple[tuple[str, str], ...]  # (variable, type) pairs

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class ActionSchema:
    """Parameterised action with positive/negative precondition templates.

    ``display`` maps a ground instance back to user-facing syntax: it has one
    entry per original argument position and may contain constants when the
    schema was specialised by a model compilation. ``excluded``/``marker`` are
    compilation hooks (never produced by the parser): ``excluded`` bars
    specific objects from binding a parameter, ``marker`` names an extra add
    effect attached at grounding time (optionally only to instances that add a
    goal literal).
    """

    name: str
    parameters: tuple[tuple[str, str], ...]
    pre_pos: tuple[Atom, ...] = ()
    pre_neg: tuple[Atom, ...] = ()
    add: tuple[Atom, ...] = ()
    delete: tuple[Atom, ...] = ()
    cost: Fraction = Fraction(1)
    display_name: str = ""
    display: tuple[str, ...] = ()
    excluded: tuple[tuple[str, tuple[str, ...]], ...] = ()
    marker: str | None = None
    marker_goal_only: bool = False

    def __post_init__(self) -> None:
        if not self.display_name:
            self.display_name = self.name
        if not self.display:
            self.display = tuple(v for v, _ in self.parameters)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.parameters)

    def excluded_for(self, var: str) -> tuple[str, ...]:
        for v, objs in self.excluded:
            if v == var:
                return objs
        return ()

    def bind(self, binding: dict[str, str], extra_name: str) -> "ActionSchema":
        """Specialise the schema by fixing some parameters to constants."""
        params = tuple((v, t) for v, t in self.parameters if v not in binding)
        return replace(
            self,
            name=extra_name,
            parameters=params,
            pre_pos=tuple(a.substitute(binding) for a in self.pre_pos),
            pre_neg=tuple(a.substitute(binding) for a in self.pre_neg),
            add=tuple(a.substitute(binding) for a in self.add),
            delete=tuple(a.substitute(binding) for a in self.delete),
            display=tuple(binding.get(d, d) for d in self.display),
            excluded=tuple((v, objs) for v, objs in self.excluded if v not in binding),
        )


@dataclass
class DomainModel:
    name: str
    types: TypeHierarchy
    predicates: tuple[Predicate, ...]
    schemas: tuple[ActionSchema, ...]
    constants: tuple[tuple[str, str], ...] = ()
    uses_costs: bool = False
    requirements: tuple[str, ...] = ()

    def predicate(self, name: str) -> Predicate:
        for p in self.predicates:
            if p.name == name:
                return p
        raise UnknownPredicate(name)

    def has_predicate(self, name: str) -> bool:
        return any(p.name == name for p in self.predicates)

    def schema(self, name: str) -> ActionSchema:
        for s in self.schemas:
            if s.name == name:
                return s
        raise UnknownPredicate(name)

    def validate(self) -> None:
        self.types.check_forest()
        seen: set[str] = set()
        for p in self.predicates:
            if p.name in seen:
                raise PddlSyntaxError(0, 0, "unique predicate name", p.name)
            seen.add(p.name)
            for _, t in p.params:
                if t not in self.types:
                    raise UnknownType(t)
        names: set[str] = set()
        for s in self.schemas:
            if s.name in names:
                raise PddlSyntaxError(0, 0, "unique action name", s.name)
            names.add(s.name)
            declared = set(s.param_names)
            consts = {c for c, _ in self.constants}
            for _, t in s.parameters:
                if t not in self.types:
                    raise UnknownType(t)
            for atom in s.pre_pos + s.pre_neg + s.add + s.delete:
                if not self.has_predicate(atom.pred) and atom.pred != s.marker:
                    raise UnknownPredicate(atom.pred)
                if self.has_predicate(atom.pred) and len(atom.args) != self.predicate(atom.pred).arity:
                    raise TypeMismatch(str(atom), f"{self.predicate(atom.pred).arity} arguments")
                for a in atom.args:
                    if a.startswith("?"):
                        if a not in declared:
                            raise PddlSyntaxError(0, 0, f"declared parameter in {s.name}", a)
                    elif a not in consts:
                        raise UnknownObject(a)


@dataclass
class ProblemModel:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...]
    init: frozenset[Atom]
    goal_pos: frozenset[Atom]
    goal_neg: frozenset[Atom]
    metric: str | None = None

    def object_type(self, name: str, domain: DomainModel) -> str:
        for n, t in self.objects + domain.constants:
            if n == name:
                return t
        raise UnknownObject(name)

    def validate(self, domain: DomainModel) -> None:
        if self.domain_name != domain.name:
            raise DomainMismatch(domain.name, self.domain_name)
        types = {}
        for n, t in self.objects + domain.constants:
            if t not in domain.types:
                raise UnknownType(t)
            types[n] = t
        for group in (self.init, self.goal_pos, self.goal_neg):
            for atom in group:
                pred = domain.predicate(atom.pred)
                if len(atom.args) != pred.arity:
                    raise TypeMismatch(str(atom), f"{pred.arity} arguments")
                for obj, (_, want) in zip(atom.args, pred.params):
                    if obj not in types:
                        raise UnknownObject(obj)
                    if not domain.types.is_subtype(types[obj], want):
                        raise TypeMismatch(str(atom), f"{want} for {obj}")
