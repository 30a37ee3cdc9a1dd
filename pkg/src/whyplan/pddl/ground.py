"""Grounding: instantiate action schemas over typed objects.

Proposition and action ids are dense integers assigned in lexicographic order
of (name, args) so repeated runs produce identical tables; contrastive
queries rely on those ids being stable and addressable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, NamedTuple

from ..errors import GroundingLimitExceeded, UnknownAction, UnknownObject
from .model import Atom, DomainModel, ProblemModel
from .printer import format_fraction

DEFAULT_INSTANTIATION_CAP = 10**6


class Goal(NamedTuple):
    pos: frozenset[int]
    neg: frozenset[int]


@dataclass(frozen=True)
class GroundAction:
    """One fully instantiated action; literal sets hold proposition ids."""

    schema: str
    args: tuple[str, ...]
    pre_pos: frozenset[int]
    pre_neg: frozenset[int]
    add: frozenset[int]
    delete: frozenset[int]
    cost: Fraction
    schema_key: str = ""
    binding: tuple[tuple[str, str], ...] = ()

    @property
    def label(self) -> str:
        if self.args:
            return "(" + self.schema + " " + " ".join(self.args) + ")"
        return "(" + self.schema + ")"


@dataclass
class GroundTask:
    """Propositional planning task with an addressable ground-action table."""

    domain_name: str
    problem_name: str
    atoms: tuple[Atom, ...]
    actions: dict[int, GroundAction]
    init: frozenset[int]
    goal: Goal
    static_predicates: frozenset[str]
    objects: tuple[tuple[str, str], ...] = ()
    atom_ids: dict[Atom, int] = field(default_factory=dict)
    action_order: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.atom_ids:
            self.atom_ids = {a: i for i, a in enumerate(self.atoms)}
        if not self.action_order:
            self.action_order = tuple(sorted(self.actions))

    def atom(self, prop: int) -> Atom:
        return self.atoms[prop]

    def atom_id(self, atom: Atom) -> int | None:
        return self.atom_ids.get(atom)

    def action(self, aid: int) -> GroundAction:
        if aid not in self.actions:
            raise UnknownAction(str(aid))
        return self.actions[aid]

    def find_action(self, label: str) -> int:
        """Resolve an ``(name args...)`` label to its ground-action id."""
        want = Atom.parse(label)
        for aid in self.action_order:
            act = self.actions[aid]
            if act.schema == want.pred and act.args == want.args:
                return aid
        raise UnknownAction(label)

    def without_action(self, aid: int) -> "GroundTask":
        """Copy of the task with one ground action removed (id retired)."""
        if aid not in self.actions:
            raise UnknownAction(str(aid))
        remaining = {k: v for k, v in self.actions.items() if k != aid}
        return replace(self, actions=remaining, action_order=tuple(k for k in self.action_order if k != aid))

    def format_props(self, props: Iterable[int]) -> list[str]:
        return [str(self.atoms[p]) for p in sorted(props)]

    def dump(self) -> str:
        """Deterministic text dump (one line per proposition and action)."""
        lines = [f"P {i} {atom}" for i, atom in enumerate(self.atoms)]
        for aid in self.action_order:
            act = self.actions[aid]
            args = " ".join(act.args)
            head = f"A {aid} {act.schema} {args}".rstrip()
            lines.append(f"{head} cost={format_fraction(act.cost)}")
        return "\n".join(lines) + "\n"


def static_predicates(domain: DomainModel) -> frozenset[str]:
    """Predicates that appear in no schema's add or delete effects."""
    touched: set[str] = set()
    for schema in domain.schemas:
        for atom in schema.add + schema.delete:
            touched.add(atom.pred)
        if schema.marker:
            touched.add(schema.marker)
    return frozenset(p.name for p in domain.predicates if p.name not in touched)


def _typed_objects(domain: DomainModel, problem: ProblemModel) -> dict[str, str]:
    typed: dict[str, str] = {}
    for name, t in domain.constants + problem.objects:
        if name in typed and typed[name] != t:
            raise UnknownObject(f"{name} declared twice with different types")
        typed[name] = t
    return typed


def ground_task(
    domain: DomainModel,
    problem: ProblemModel,
    prune_static: bool = True,
    max_instantiations: int = DEFAULT_INSTANTIATION_CAP,
) -> GroundTask:
    """Instantiate every schema over all type-consistent object tuples.

    With ``prune_static`` on, an instance whose positive precondition includes
    a static atom absent from the initial state is dropped: that atom can
    never become true, so the instance can never apply.
    """
    typed = _typed_objects(domain, problem)
    statics = static_predicates(domain)
    init_atoms = set(problem.init)
    goal_pos_atoms = set(problem.goal_pos)

    candidate_cache: dict[str, list[str]] = {}

    def candidates(want: str) -> list[str]:
        if want not in candidate_cache:
            candidate_cache[want] = [o for o in sorted(typed) if domain.types.is_subtype(typed[o], want)]
        return candidate_cache[want]

    raw: list[tuple[str, tuple[str, ...], str, frozenset[Atom], frozenset[Atom], frozenset[Atom], frozenset[Atom], Fraction, tuple[tuple[str, str], ...]]] = []
    total = 0
    for schema in domain.schemas:
        pools = []
        for var, want in schema.parameters:
            banned = set(schema.excluded_for(var))
            pools.append([o for o in candidates(want) if o not in banned])
        count = 1
        for pool in pools:
            count *= len(pool)
        total += count
        if total > max_instantiations:
            raise GroundingLimitExceeded(total, max_instantiations)
        for combo in itertools.product(*pools):
            binding = dict(zip(schema.param_names, combo))
            pre_pos = frozenset(a.substitute(binding) for a in schema.pre_pos)
            if prune_static and any(a.pred in statics and a not in init_atoms for a in pre_pos):
                continue
            pre_neg = frozenset(a.substitute(binding) for a in schema.pre_neg)
            add = set(a.substitute(binding) for a in schema.add)
            if schema.marker and (not schema.marker_goal_only or add & goal_pos_atoms):
                add.add(Atom(schema.marker, ()))
            delete = frozenset(a.substitute(binding) for a in schema.delete) - add
            args = tuple(binding.get(d, d) for d in schema.display)
            raw.append(
                (
                    schema.display_name,
                    args,
                    schema.name,
                    pre_pos,
                    pre_neg,
                    frozenset(add),
                    delete,
                    schema.cost,
                    tuple(sorted(binding.items())),
                )
            )

    raw.sort(key=lambda r: (r[0], r[1], r[2]))

    atom_set: set[Atom] = set(init_atoms) | goal_pos_atoms | set(problem.goal_neg)
    for _, _, _, pre_pos, pre_neg, add, delete, _, _ in raw:
        atom_set |= pre_pos | pre_neg | add | delete
    atoms = tuple(sorted(atom_set))
    ids = {a: i for i, a in enumerate(atoms)}

    def to_ids(group: frozenset[Atom]) -> frozenset[int]:
        return frozenset(ids[a] for a in group)

    actions: dict[int, GroundAction] = {}
    for aid, (name, args, key, pre_pos, pre_neg, add, delete, cost, binding) in enumerate(raw):
        actions[aid] = GroundAction(
            schema=name,
            args=args,
            pre_pos=to_ids(pre_pos),
            pre_neg=to_ids(pre_neg),
            add=to_ids(add),
            delete=to_ids(delete),
            cost=cost,
            schema_key=key,
            binding=binding,
        )

    return GroundTask(
        domain_name=domain.name,
        problem_name=problem.name,
        atoms=atoms,
        actions=actions,
        init=frozenset(ids[a] for a in init_atoms),
        goal=Goal(pos=frozenset(ids[a] for a in goal_pos_atoms), neg=frozenset(ids[a] for a in problem.goal_neg)),
        static_predicates=statics,
        objects=tuple(sorted(typed.items())),
    )
