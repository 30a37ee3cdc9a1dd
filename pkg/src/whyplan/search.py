"""Forward state-space search over ground tasks.

One best-first loop serves three strategies: A* (f = g + h), greedy
best-first (f = h) and uniform-cost (f = g). Uniform-cost with the zero
heuristic is the complete, optimal configuration used as the oracle and as
the exhaustive unsolvability prover. Heuristics are computed on the delete
relaxation; negative preconditions and negative goals are treated as free
there, which keeps h_max admissible.

Tie-breaking among equal f values: lower g, then lower id of the generating
action, then insertion order. Fixed tie-breaking makes plans reproducible,
which downstream explanations depend on.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable

from .errors import NotApplicable
from .pddl.ground import Goal, GroundTask

State = frozenset[int]


class Strategy(str, Enum):
    ASTAR = "astar"
    GREEDY = "greedy"
    UNIFORM = "uniform"


class Heuristic(str, Enum):
    HADD = "hadd"
    HMAX = "hmax"
    GOAL_COUNT = "goalcount"
    ZERO = "zero"


@dataclass(frozen=True)
class Plan:
    steps: tuple[int, ...]
    total_cost: Fraction

    def __len__(self) -> int:
        return len(self.steps)


def plan_cost(task: GroundTask, steps: Iterable[int]) -> Fraction:
    return sum((task.actions[a].cost for a in steps), Fraction(0))


def make_plan(task: GroundTask, steps: Iterable[int]) -> Plan:
    steps = tuple(steps)
    return Plan(steps=steps, total_cost=plan_cost(task, steps))


@dataclass(frozen=True)
class PlanFound:
    plan: Plan
    explored_states: int = 0


@dataclass(frozen=True)
class Unsolvable:
    explored_states: int


@dataclass(frozen=True)
class ResourceLimit:
    explored_states: int
    limit: str  # "nodes" or "time"


SearchResult = PlanFound | Unsolvable | ResourceLimit


@dataclass
class SearchConfig:
    strategy: Strategy = Strategy.UNIFORM
    heuristic: Heuristic = Heuristic.ZERO
    forbidden_states: frozenset[State] = frozenset()
    forbidden_actions: frozenset[int] = frozenset()
    node_limit: int = 10**6
    time_limit: float | None = 60.0

    @staticmethod
    def oracle(**kwargs) -> "SearchConfig":
        """Complete and cost-optimal configuration (uniform-cost search)."""
        return SearchConfig(strategy=Strategy.UNIFORM, heuristic=Heuristic.ZERO, **kwargs)


def applicability_gap(task: GroundTask, state: State, aid: int) -> tuple[list, list]:
    """Unsatisfied precondition literals of `aid` in `state` (as atoms)."""
    act = task.action(aid)
    missing = [task.atoms[p] for p in sorted(act.pre_pos - state)]
    violated = [task.atoms[p] for p in sorted(act.pre_neg & state)]
    return missing, violated


def is_applicable(task: GroundTask, state: State, aid: int) -> bool:
    act = task.actions[aid]
    return act.pre_pos <= state and not (act.pre_neg & state)


def apply_action(task: GroundTask, state: State, aid: int) -> State:
    missing, violated = applicability_gap(task, state, aid)
    if missing or violated:
        raise NotApplicable(missing, violated)
    act = task.actions[aid]
    return (state - act.delete) | act.add


def satisfies(state: State, goal: Goal) -> bool:
    return goal.pos <= state and not (goal.neg & state)


def trace_of(task: GroundTask, start: State, plan: Plan | Iterable[int]) -> list[State]:
    """States visited by executing the plan; raises NotApplicable with the
    failing step index when a precondition breaks."""
    steps = plan.steps if isinstance(plan, Plan) else tuple(plan)
    states = [start]
    for i, aid in enumerate(steps):
        missing, violated = applicability_gap(task, states[-1], aid)
        if missing or violated:
            raise NotApplicable(missing, violated, step=i)
        act = task.actions[aid]
        states.append((states[-1] - act.delete) | act.add)
    return states


# ---------------------------------------------------------------------------
# Heuristics (delete relaxation)


def _relaxed_costs(task: GroundTask, state: State, forbidden_actions: frozenset[int], combine_sum: bool) -> dict[int, Fraction]:
    """Cheapest relaxed achievement cost per proposition from `state`.

    Generalised Dijkstra over propositions: an action fires once all its
    positive preconditions are reached; its trigger cost aggregates them by
    sum (h_add) or max (h_max). Delete effects and negative preconditions
    are ignored.
    """
    costs: dict[int, Fraction] = {p: Fraction(0) for p in state}
    waiting: dict[int, list[int]] = {}
    remaining: dict[int, int] = {}
    agg: dict[int, Fraction] = {}
    queue: list[tuple[Fraction, int]] = [(Fraction(0), p) for p in state]
    heapq.heapify(queue)

    ready: list[int] = []
    for aid in task.action_order:
        if aid in forbidden_actions:
            continue
        pre = task.actions[aid].pre_pos
        remaining[aid] = len(pre)
        agg[aid] = Fraction(0)
        if not pre:
            ready.append(aid)
        for p in pre:
            waiting.setdefault(p, []).append(aid)

    def fire(aid: int) -> None:
        act = task.actions[aid]
        through = agg[aid] + act.cost
        for q in act.add:
            if q not in costs or through < costs[q]:
                costs[q] = through
                heapq.heappush(queue, (through, q))

    for aid in ready:
        fire(aid)

    settled: set[int] = set()
    while queue:
        c, p = heapq.heappop(queue)
        if p in settled or costs.get(p, None) != c:
            continue
        settled.add(p)
        for aid in waiting.get(p, ()):
            remaining[aid] -= 1
            if combine_sum:
                agg[aid] += c
            else:
                agg[aid] = max(agg[aid], c)
            if remaining[aid] == 0:
                fire(aid)
    return costs


def _relaxation_heuristic(task: GroundTask, goal: Goal, forbidden: frozenset[int], combine_sum: bool) -> Callable[[State], Fraction | float]:
    def h(state: State) -> Fraction | float:
        costs = _relaxed_costs(task, state, forbidden, combine_sum)
        total = Fraction(0)
        for g in goal.pos:
            if g not in costs:
                return math.inf
            total = total + costs[g] if combine_sum else max(total, costs[g])
        return total

    return h


def make_heuristic(kind: Heuristic, task: GroundTask, goal: Goal, forbidden: frozenset[int] = frozenset()) -> Callable[[State], Fraction | float]:
    if kind is Heuristic.ZERO:
        return lambda state: Fraction(0)
    if kind is Heuristic.GOAL_COUNT:
        return lambda state: Fraction(len(goal.pos - state) + len(goal.neg & state))
    if kind is Heuristic.HADD:
        return _relaxation_heuristic(task, goal, forbidden, combine_sum=True)
    if kind is Heuristic.HMAX:
        return _relaxation_heuristic(task, goal, forbidden, combine_sum=False)
    raise ValueError(f"unknown heuristic {kind}")


# ---------------------------------------------------------------------------
# Best-first search


def search_plan(task: GroundTask, start: State, goal: Goal, cfg: SearchConfig | None = None) -> SearchResult:
    """Best-first search from `start` to `goal` under `cfg`.

    Returns PlanFound with a plan that avoids every forbidden state and
    action; Unsolvable only after exhausting the reachable (allowed) space;
    ResourceLimit when the node or time budget runs out first.
    """
    cfg = cfg or SearchConfig()
    if start in cfg.forbidden_states:
        return Unsolvable(explored_states=0)

    h = make_heuristic(cfg.heuristic if cfg.strategy is not Strategy.UNIFORM else Heuristic.ZERO, task, goal, cfg.forbidden_actions)

    def priority(g: Fraction, hv) -> tuple:
        if cfg.strategy is Strategy.ASTAR:
            return (g + hv, g)
        if cfg.strategy is Strategy.GREEDY:
            return (hv, g)
        return (g, g)

    start_h = h(start)
    if start_h == math.inf:
        # goal unreachable even under the relaxation: the whole reachable
        # space still has to be swept to certify unsolvability
        pass

    counter = 0
    open_heap: list = []
    best_g: dict[State, Fraction] = {start: Fraction(0)}
    parent: dict[State, tuple[State, int] | None] = {start: None}
    heapq.heappush(open_heap, (*priority(Fraction(0), start_h if start_h != math.inf else Fraction(0)), -1, counter, start))

    expanded = 0
    deadline = time.monotonic() + cfg.time_limit if cfg.time_limit else None
    closed: set[State] = set()

    while open_heap:
        entry = heapq.heappop(open_heap)
        state = entry[-1]
        g = best_g[state]
        if state in closed:
            continue
        closed.add(state)

        if satisfies(state, goal):
            steps: list[int] = []
            cur = state
            while parent[cur] is not None:
                prev, aid = parent[cur]
                steps.append(aid)
                cur = prev
            steps.reverse()
            return PlanFound(plan=Plan(steps=tuple(steps), total_cost=g), explored_states=expanded)

        expanded += 1
        if expanded > cfg.node_limit:
            return ResourceLimit(explored_states=expanded, limit="nodes")
        if deadline is not None and expanded % 256 == 0 and time.monotonic() > deadline:
            return ResourceLimit(explored_states=expanded, limit="time")

        for aid in task.action_order:
            if aid in cfg.forbidden_actions:
                continue
            act = task.actions[aid]
            if not (act.pre_pos <= state) or (act.pre_neg & state):
                continue
            succ = (state - act.delete) | act.add
            if succ in cfg.forbidden_states or succ in closed:
                continue
            g2 = g + act.cost
            if succ in best_g and best_g[succ] <= g2:
                continue
            hv = h(succ)
            if hv == math.inf:
                continue  # relaxation-unreachable implies truly unreachable
            best_g[succ] = g2
            parent[succ] = (state, aid)
            counter += 1
            heapq.heappush(open_heap, (*priority(g2, hv), aid, counter, succ))

    return Unsolvable(explored_states=expanded)
