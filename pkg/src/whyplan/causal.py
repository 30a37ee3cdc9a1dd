"""Causal-link extraction and "why is this action in the plan" answers.

A causal link (producer, proposition, consumer) records that the producer's
add effect supplies a positive precondition of the consumer (or a goal
literal) and nothing in between deletes it. The producer is the latest
earlier achiever, matching execution semantics. Links whose producer is the
initial state are omitted from answers: "because it was true initially"
explains nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Final

from .errors import InvalidPlan, StepOutOfRange
from .pddl.ground import GroundTask
from .search import Plan
from .validate import validate_plan

GOAL: Final[str] = "goal"
INIT_STEP: Final[int] = -1


@dataclass(frozen=True)
class CausalLink:
    producer: int
    prop: int
    consumer: int | str  # step index or GOAL

    def to_json(self, task: GroundTask) -> dict:
        return {"producer": self.producer, "prop": str(task.atoms[self.prop]), "consumer": self.consumer}


@dataclass
class WhyAnswer:
    target: int
    links: tuple[CausalLink, ...]
    alternatives: dict[int, tuple[int, ...]]  # supported prop -> other achiever ids
    text: str

    def to_json(self, task: GroundTask) -> dict:
        return {
            "target": self.target,
            "links": [l.to_json(task) for l in self.links],
            "alternatives": {
                str(task.atoms[p]): [task.actions[a].label for a in acts]
                for p, acts in sorted(self.alternatives.items())
            },
            "text": self.text,
        }


def _links_with_init(task: GroundTask, plan: Plan, start=None) -> list[CausalLink]:
    report = validate_plan(task, plan, start=start)
    if not report.valid:
        raise InvalidPlan("causal links are only defined for valid plans")
    steps = plan.steps
    links: list[CausalLink] = []

    def latest_producer(prop: int, before: int) -> int:
        for i in range(before - 1, -1, -1):
            if prop in task.actions[steps[i]].add:
                return i
        return INIT_STEP

    for j, aid in enumerate(steps):
        for prop in sorted(task.actions[aid].pre_pos):
            links.append(CausalLink(latest_producer(prop, j), prop, j))
    for prop in sorted(task.goal.pos):
        links.append(CausalLink(latest_producer(prop, len(steps)), prop, GOAL))
    return links


def extract_causal_links(task: GroundTask, plan: Plan, start=None) -> tuple[CausalLink, ...]:
    """All links between plan steps (and the goal); links supplied by the
    starting state are dropped from the result."""
    return tuple(l for l in _links_with_init(task, plan, start) if l.producer != INIT_STEP)


def why_action(task: GroundTask, plan: Plan, step: int, start=None) -> WhyAnswer:
    """Answer: which later needs does this step serve, and what else could
    have served them."""
    if not 0 <= step < len(plan.steps):
        raise StepOutOfRange(step, len(plan.steps))
    target_aid = plan.steps[step]
    links = tuple(l for l in extract_causal_links(task, plan, start) if l.producer == step)

    alternatives: dict[int, tuple[int, ...]] = {}
    for prop in sorted({l.prop for l in links}):
        others = tuple(
            aid for aid in task.action_order if aid != target_aid and prop in task.actions[aid].add
        )
        alternatives[prop] = others

    text = _render(task, plan, step, links, alternatives)
    return WhyAnswer(target=step, links=links, alternatives=alternatives, text=text)


def _consumer_label(task: GroundTask, plan: Plan, consumer: int | str) -> str:
    if consumer == GOAL:
        return "the goal"
    return f"step {consumer} {task.actions[plan.steps[consumer]].label}"


def _render(task: GroundTask, plan: Plan, step: int, links, alternatives) -> str:
    label = task.actions[plan.steps[step]].label
    if not links:
        return (
            f"step {step} {label} is causally redundant here: none of its effects "
            "are used by a later step or by the goal"
        )
    consumers = sorted({_consumer_label(task, plan, l.consumer) for l in links})
    lines = [f"step {step} {label} supports {', '.join(consumers)}"]
    for prop, others in sorted(alternatives.items()):
        atom = task.atoms[prop]
        if others:
            names = ", ".join(task.actions[a].label for a in others)
            lines.append(f"the condition {atom} could otherwise only be achieved by {names}")
        else:
            lines.append(f"the condition {atom} has no other achiever: this action is the only way to produce it")
    return "; ".join(lines)
