"""Plan validation, failure diagnosis and metric re-scoring.

Validation simulates a plan step by step from the task's initial state and
reports the first precondition violation or a final goal miss. Metrics are
additive per-action scores and may differ from the metric the plan was
searched under; re-scoring never replans.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import InvalidPlan
from .pddl.ground import GroundTask
from .pddl.model import Atom
from .pddl.printer import format_fraction
from .search import Plan, State, applicability_gap, satisfies

TOTAL_COST = "total_cost"
PLAN_LENGTH = "plan_length"
WEIGHTED_COST = "weighted_cost"


@dataclass(frozen=True)
class Metric:
    kind: str
    weights: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (TOTAL_COST, PLAN_LENGTH, WEIGHTED_COST):
            raise ValueError(f"unknown metric kind {self.kind}")
        for _, w in self.weights:
            if w < 0:
                raise ValueError("metric weights must be nonnegative")

    @staticmethod
    def total_cost() -> "Metric":
        return Metric(TOTAL_COST)

    @staticmethod
    def plan_length() -> "Metric":
        return Metric(PLAN_LENGTH)

    @staticmethod
    def weighted(weights: dict[str, Fraction | int]) -> "Metric":
        pairs = tuple(sorted((k, Fraction(v)) for k, v in weights.items()))
        return Metric(WEIGHTED_COST, pairs)

    def __str__(self) -> str:
        if self.kind != WEIGHTED_COST:
            return self.kind
        inner = ",".join(f"{k}:{format_fraction(w)}" for k, w in self.weights)
        return f"{WEIGHTED_COST}{{{inner}}}"

    @staticmethod
    def parse(text: str) -> "Metric":
        text = text.strip()
        if text == TOTAL_COST:
            return Metric.total_cost()
        if text == PLAN_LENGTH:
            return Metric.plan_length()
        if text.startswith(WEIGHTED_COST + "{") and text.endswith("}"):
            inner = text[len(WEIGHTED_COST) + 1 : -1]
            weights: dict[str, Fraction] = {}
            if inner:
                for part in inner.split(","):
                    name, _, value = part.partition(":")
                    weights[name.strip()] = Fraction(value.strip())
            return Metric.weighted(weights)
        raise ValueError(f"unknown metric {text!r}")


@dataclass(frozen=True)
class ValidationFailure:
    kind: str  # "precondition" or "goal"
    step: int | None
    missing: tuple[Atom, ...] = ()
    violated: tuple[Atom, ...] = ()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "step": self.step,
            "missing": [str(a) for a in self.missing],
            "violated": [str(a) for a in self.violated],
        }


@dataclass
class ValidationReport:
    valid: bool
    failure: ValidationFailure | None
    metric_values: dict[Metric, Fraction] = field(default_factory=dict)
    trace: tuple[State, ...] = ()

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "failure": self.failure.to_json() if self.failure else None,
            "metrics": {str(m): format_fraction(v) for m, v in sorted(self.metric_values.items(), key=lambda kv: str(kv[0]))},
        }


def _simulate(task: GroundTask, steps: tuple[int, ...], start: State) -> tuple[list[State], ValidationFailure | None]:
    states = [start]
    for i, aid in enumerate(steps):
        missing, violated = applicability_gap(task, states[-1], aid)
        if missing or violated:
            return states, ValidationFailure("precondition", i, tuple(missing), tuple(violated))
        act = task.actions[aid]
        states.append((states[-1] - act.delete) | act.add)
    return states, None


def validate_plan(
    task: GroundTask,
    plan: Plan | Iterable[int],
    metrics: Iterable[Metric] = (),
    start: State | None = None,
    goal=None,
) -> ValidationReport:
    """Simulate the plan and report validity, failure diagnosis and metrics.

    `start` and `goal` default to the task's own; monitoring revalidates plan
    suffixes from believed states by overriding them.
    """
    steps = plan.steps if isinstance(plan, Plan) else tuple(plan)
    start = task.init if start is None else start
    goal = task.goal if goal is None else goal
    states, failure = _simulate(task, steps, start)
    if failure is None and not satisfies(states[-1], goal):
        missing = tuple(task.atoms[p] for p in sorted(goal.pos - states[-1]))
        violated = tuple(task.atoms[p] for p in sorted(goal.neg & states[-1]))
        failure = ValidationFailure("goal", None, missing, violated)
    report = ValidationReport(valid=failure is None, failure=failure, trace=tuple(states))
    if report.valid:
        for metric in metrics:
            report.metric_values[metric] = _score(task, steps, metric)
    return report


def _score(task: GroundTask, steps: tuple[int, ...], metric: Metric) -> Fraction:
    if metric.kind == TOTAL_COST:
        return sum((task.actions[a].cost for a in steps), Fraction(0))
    if metric.kind == PLAN_LENGTH:
        return Fraction(len(steps))
    weights = dict(metric.weights)
    total = Fraction(0)
    for aid in steps:
        act = task.actions[aid]
        total += weights.get(act.schema, Fraction(1)) * act.cost
    return total


def evaluate_metric(plan: Plan | Iterable[int], metric: Metric, task: GroundTask) -> Fraction:
    """Score a plan under one metric; the plan must validate first."""
    steps = plan.steps if isinstance(plan, Plan) else tuple(plan)
    states, failure = _simulate(task, steps, task.init)
    if failure is None and not satisfies(states[-1], task.goal):
        failure = ValidationFailure("goal", None)
    if failure is not None:
        raise InvalidPlan(f"cannot score an invalid plan ({failure.kind} failure at step {failure.step})")
    return _score(task, steps, metric)


def explain_inapplicable(task: GroundTask, state: State, aid: int) -> tuple[list[Atom], list[Atom]]:
    """Exact unsatisfied literal sets; both empty iff the action applies."""
    return applicability_gap(task, state, aid)
