"""Seeded random task and model generators for the property suites."""

from __future__ import annotations

import random
from fractions import Fraction

from whyplan.pddl.ground import Goal, GroundAction, GroundTask
from whyplan.pddl.model import (
    ActionSchema,
    Atom,
    DomainModel,
    Predicate,
    ProblemModel,
    TypeHierarchy,
)


def make_task(n_props: int, actions: list[dict], init, goal_pos, goal_neg=(), name="micro") -> GroundTask:
    """Build a propositional task directly; `actions` entries carry atom ids."""
    atoms = tuple(Atom(f"p{i}", ()) for i in range(n_props))
    table = {}
    for i, entry in enumerate(actions):
        table[i] = GroundAction(
            schema=entry.get("name", f"a{i}"),
            args=tuple(entry.get("args", ())),
            pre_pos=frozenset(entry.get("pre", ())),
            pre_neg=frozenset(entry.get("neg", ())),
            add=frozenset(entry.get("add", ())),
            delete=frozenset(entry.get("del", ())) - frozenset(entry.get("add", ())),
            cost=Fraction(entry.get("cost", 1)),
            schema_key=entry.get("name", f"a{i}"),
        )
    touched = set()
    for act in table.values():
        for p in act.add | act.delete:
            touched.add(atoms[p].pred)
    statics = frozenset(a.pred for a in atoms) - touched
    return GroundTask(
        domain_name=name,
        problem_name=name,
        atoms=atoms,
        actions=table,
        init=frozenset(init),
        goal=Goal(pos=frozenset(goal_pos), neg=frozenset(goal_neg)),
        static_predicates=frozenset(statics),
    )


def random_task(rng: random.Random, solvable_bias: bool = True) -> GroundTask:
    """Small random propositional task; goals are often (not always) reachable.

    Mostly tiny instances with an occasional larger one (up to 2^11 states)
    so the suites also cross deeper search spaces.
    """
    n = rng.randint(9, 11) if rng.random() < 0.1 else rng.randint(4, 8)
    n_actions = rng.randint(4, 16)
    actions = []
    for i in range(n_actions):
        pre = rng.sample(range(n), rng.randint(0, 2))
        neg = [p for p in rng.sample(range(n), rng.randint(0, 1)) if p not in pre]
        add = rng.sample(range(n), rng.randint(1, 2))
        dele = rng.sample(range(n), rng.randint(0, 2))
        actions.append(
            {"pre": pre, "neg": neg, "add": add, "del": dele, "cost": rng.choice([0, 1, 1, 2, 3, 5])}
        )
    init = rng.sample(range(n), rng.randint(1, max(1, n // 2)))
    task = make_task(n, actions, init, goal_pos=())

    if solvable_bias and rng.random() < 0.8:
        # random walk from init; pick goal literals from a reached state
        state = task.init
        for _ in range(rng.randint(0, 8)):
            applicable = [
                aid
                for aid in task.action_order
                if task.actions[aid].pre_pos <= state and not (task.actions[aid].pre_neg & state)
            ]
            if not applicable:
                break
            act = task.actions[rng.choice(applicable)]
            state = (state - act.delete) | act.add
        pool = sorted(state)
        goal_pos = rng.sample(pool, min(len(pool), rng.randint(1, 2))) if pool else []
    else:
        goal_pos = rng.sample(range(n), rng.randint(1, 2))
    return make_task(
        n,
        actions,
        task.init,
        goal_pos=goal_pos,
    )


_TYPE_NAMES = ("blob", "gadget")


def random_model(rng: random.Random) -> tuple[DomainModel, ProblemModel]:
    """Small random typed domain/problem pair for grounding tests."""
    types = TypeHierarchy()
    for t in _TYPE_NAMES:
        types.declare(t)
    n_objects = rng.randint(2, 4)
    objects = tuple((f"o{i}", rng.choice(_TYPE_NAMES)) for i in range(n_objects))

    predicates = []
    for i in range(rng.randint(2, 4)):
        arity = rng.randint(0, 2)
        params = tuple((f"?x{j}", rng.choice(_TYPE_NAMES + ("object",))) for j in range(arity))
        predicates.append(Predicate(f"q{i}", params))

    def random_literal(params, rng):
        pred = rng.choice(predicates)
        args = []
        for _, want in pred.params:
            fitting = [v for v, t in params if want == "object" or t == want]
            if not fitting:
                return None
            args.append(rng.choice(fitting))
        return Atom(pred.name, tuple(args))

    schemas = []
    effect_preds = set()
    for i in range(rng.randint(2, 4)):
        arity = rng.randint(1, 2)
        params = tuple((f"?v{j}", rng.choice(_TYPE_NAMES)) for j in range(arity))
        lits = [random_literal(params, rng) for _ in range(6)]
        lits = [l for l in lits if l is not None]
        if not lits:
            continue
        pre = lits[:2]
        add = lits[2:4] or lits[:1]
        dele = lits[4:6]
        # keep one predicate effect-free now and then so statics exist
        add = [a for a in add if a.pred != "q0"] or add
        schemas.append(
            ActionSchema(
                name=f"act{i}",
                parameters=params,
                pre_pos=tuple(pre),
                pre_neg=(),
                add=tuple(add),
                delete=tuple(dele),
                cost=Fraction(rng.randint(1, 3)),
            )
        )
    domain = DomainModel(
        name="randdom",
        types=types,
        predicates=tuple(predicates),
        schemas=tuple(schemas),
        uses_costs=True,
        requirements=(":strips", ":typing", ":action-costs"),
    )

    def ground_atoms(pred: Predicate):
        pools = []
        for _, want in pred.params:
            pools.append([n for n, t in objects if want == "object" or t == want])
        out = []

        def rec(i, acc):
            if i == len(pools):
                out.append(Atom(pred.name, tuple(acc)))
                return
            for o in pools[i]:
                rec(i + 1, acc + [o])

        rec(0, [])
        return out

    all_atoms = [a for p in predicates for a in ground_atoms(p)]
    init = frozenset(a for a in all_atoms if rng.random() < 0.4)
    goal_pool = [a for a in all_atoms if rng.random() < 0.2]
    problem = ProblemModel(
        name="randprob",
        domain_name="randdom",
        objects=objects,
        init=init,
        goal_pos=frozenset(goal_pool[:2]),
        goal_neg=frozenset(),
    )
    return domain, problem
