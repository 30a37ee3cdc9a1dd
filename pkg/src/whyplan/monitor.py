"""Execution monitoring: dependency filters, violations and no-replan answers.

Once a plan is dispatched, its executability depends on a small set of static
facts: the filter is the intersection of the static facts in the problem
instance with the union of all plan-step preconditions, plus the objects those
facts mention. Knowledge-base changes are checked against the filter; a
change that falsifies a filter fact needed by a not-yet-executed step raises a
violation naming the earliest affected action. Changes the filter does not
catch are still answerable ("why do I not need to replan"): either the
observation matched the predicted trace, or it is irrelevant to the remaining
steps, or revalidating the remaining suffix from the believed state shows the
plan still works. The filter is the fast path; revalidation is the complete
path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .errors import InvalidPlan, PddlSyntaxError, RevalidationFailed, StaleUpdate
from .pddl.ground import GroundTask
from .pddl.model import Atom
from .report import ExplanationReport
from .search import Plan, State, trace_of
from .validate import ValidationReport, validate_plan

OP_ADD = "add"
OP_REMOVE = "remove"
OP_REMOVE_OBJECT = "remove_object"


@dataclass(frozen=True)
class Filter:
    facts: frozenset[int]
    objects: tuple[str, ...]

    def to_json(self, task: GroundTask) -> dict:
        return {"facts": task.format_props(self.facts), "objects": list(self.objects)}


@dataclass(frozen=True)
class KnowledgeBaseUpdate:
    seq: int
    op: str  # add | remove | remove_object
    literal: Atom | None  # None only for remove_object
    at_plan_index: int
    object_name: str = ""

    @staticmethod
    def from_json(record: dict) -> "KnowledgeBaseUpdate":
        op = record["op"]
        if op == OP_REMOVE_OBJECT:
            return KnowledgeBaseUpdate(
                seq=int(record["seq"]), op=op, literal=None, at_plan_index=int(record["at"]), object_name=record["object"]
            )
        if op not in (OP_ADD, OP_REMOVE):
            raise PddlSyntaxError(1, 1, "op add/remove/remove_object", op)
        return KnowledgeBaseUpdate(
            seq=int(record["seq"]), op=op, literal=Atom.parse(record["literal"]), at_plan_index=int(record["at"])
        )

    def to_json(self) -> dict:
        if self.op == OP_REMOVE_OBJECT:
            return {"seq": self.seq, "op": self.op, "object": self.object_name, "at": self.at_plan_index}
        return {"seq": self.seq, "op": self.op, "literal": str(self.literal), "at": self.at_plan_index}


def read_updates(text: str) -> list[KnowledgeBaseUpdate]:
    """Parse a newline-delimited JSON update stream."""
    updates = []
    for line in text.splitlines():
        line = line.strip()
        if line:
            updates.append(KnowledgeBaseUpdate.from_json(json.loads(line)))
    return updates


@dataclass(frozen=True)
class ViolationReport:
    violated_facts: tuple[int, ...]
    affected_steps: tuple[tuple[int, str], ...]  # (plan index, action label)
    earliest_affected: int
    update_seq: int
    object_level: bool = False

    def to_json(self, task: GroundTask) -> dict:
        return {
            "violated_facts": task.format_props(self.violated_facts),
            "affected_steps": [{"index": i, "action": label} for i, label in self.affected_steps],
            "earliest_affected": self.earliest_affected,
            "update_seq": self.update_seq,
            "object_level": self.object_level,
        }


@dataclass(frozen=True)
class NoReplanReport:
    reason: str  # not_in_filter | still_valid | observation_expected
    literal: Atom | None = None
    revalidation: ValidationReport | None = None
    matched_state_index: int | None = None

    def to_json(self) -> dict:
        body: dict = {"reason": self.reason}
        if self.reason == "not_in_filter":
            body["literal"] = str(self.literal)
        elif self.reason == "still_valid":
            body["revalidation"] = self.revalidation.to_json()
        else:
            body["matched_state_index"] = self.matched_state_index
        return body


def build_filter(task: GroundTask, plan: Plan) -> Filter:
    """Static facts the plan relies on, plus the objects they mention."""
    report = validate_plan(task, plan)
    if not report.valid:
        raise InvalidPlan("filters are built for valid plans only")
    needed: set[int] = set()
    for aid in plan.steps:
        for prop in task.actions[aid].pre_pos:
            atom = task.atoms[prop]
            if atom.pred in task.static_predicates and prop in task.init:
                needed.add(prop)
    objects: set[str] = set()
    for prop in needed:
        objects.update(task.atoms[prop].args)
    return Filter(facts=frozenset(needed), objects=tuple(sorted(objects)))


@dataclass
class MonitorSession:
    """Single-consumer monitor for one executing plan.

    The believed world is the predicted trace state at the execution cursor
    patched by every knowledge-base update seen so far. Updates must arrive
    in strictly increasing `seq` order.
    """

    task: GroundTask
    plan: Plan
    filter: Filter = field(init=False)
    trace: list[State] = field(init=False)
    updates: list[KnowledgeBaseUpdate] = field(default_factory=list, init=False)
    violations: list[ViolationReport] = field(default_factory=list, init=False)
    added: set[Atom] = field(default_factory=set, init=False)
    removed: set[Atom] = field(default_factory=set, init=False)
    cursor: int = field(default=-1, init=False)
    last_seq: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        self.filter = build_filter(self.task, self.plan)
        self.trace = trace_of(self.task, self.task.init, self.plan)

    # -- state bookkeeping -------------------------------------------------

    def predicted_state(self, at: int) -> State:
        """Predicted post-state of step `at` (clamped to the final state)."""
        return self.trace[min(at + 1, len(self.trace) - 1)]

    def believed_state(self, at: int, up_to_seq: int | None = None) -> State:
        """Predicted state patched by updates (optionally only seq <= bound)."""
        if up_to_seq is None:
            added, removed = self.added, self.removed
        else:
            added, removed = set(), set()
            for u in self.updates:
                if u.seq > up_to_seq or u.literal is None:
                    continue
                if u.op == OP_ADD:
                    added.add(u.literal)
                    removed.discard(u.literal)
                elif u.op == OP_REMOVE:
                    removed.add(u.literal)
                    added.discard(u.literal)
        state = set(self.predicted_state(at))
        for atom in removed:
            prop = self.task.atom_id(atom)
            if prop is not None:
                state.discard(prop)
        for atom in added:
            prop = self.task.atom_id(atom)
            if prop is not None:
                state.add(prop)
        return frozenset(state)

    def _record(self, update: KnowledgeBaseUpdate) -> None:
        if update.seq <= self.last_seq:
            raise StaleUpdate(update.seq, self.last_seq)
        self.last_seq = update.seq
        self.cursor = max(self.cursor, update.at_plan_index)
        self.updates.append(update)
        if update.op == OP_ADD:
            self.added.add(update.literal)
            self.removed.discard(update.literal)
        elif update.op == OP_REMOVE:
            self.removed.add(update.literal)
            self.added.discard(update.literal)

    # -- the filter check --------------------------------------------------

    def process_update(self, update: KnowledgeBaseUpdate) -> ViolationReport | None:
        """Record one update; report when it falsifies a depended-on fact.

        Only steps after the currently executing one can be affected: past
        steps cannot fail retroactively. Removing an object reports every
        filter fact that mentions it, flagged as object-level.
        """
        self._record(update)
        if update.op == OP_ADD:
            return None
        if update.op == OP_REMOVE_OBJECT:
            facts = sorted(p for p in self.filter.facts if update.object_name in self.task.atoms[p].args)
        else:
            prop = self.task.atom_id(update.literal)
            facts = [prop] if prop is not None and prop in self.filter.facts else []
        if not facts:
            return None
        affected: list[tuple[int, str]] = []
        fact_set = set(facts)
        for idx in range(update.at_plan_index + 1, len(self.plan.steps)):
            act = self.task.actions[self.plan.steps[idx]]
            if act.pre_pos & fact_set:
                affected.append((idx, act.label))
        if not affected:
            return None
        report = ViolationReport(
            violated_facts=tuple(facts),
            affected_steps=tuple(affected),
            earliest_affected=affected[0][0],
            update_seq=update.seq,
            object_level=update.op == OP_REMOVE_OBJECT,
        )
        self.violations.append(report)
        return report

    # -- question answering --------------------------------------------------

    def explain_replan_needed(self, report: ViolationReport) -> ExplanationReport:
        """Name the broken dependency, the observation, and the first casualty."""
        update = next(u for u in self.updates if u.seq == report.update_seq)
        facts = ", ".join(self.task.format_props(report.violated_facts))
        steps = "; ".join(f"plan step {i} {label} depends on it" for i, label in report.affected_steps)
        immediate = report.earliest_affected == update.at_plan_index + 1
        text = f"replanning needed: observed not {facts} (update {update.seq}); {steps}"
        if immediate:
            text += "; the very next step is affected"
        return ExplanationReport(
            question="q5",
            text=text,
            evidence={
                "violation": report.to_json(self.task),
                "observation": update.to_json(),
                "immediate": immediate,
            },
        )

    def explain_no_replan(self, update: KnowledgeBaseUpdate) -> NoReplanReport:
        """Justify not replanning after an already-processed benign update.

        Checks, in order: did the observation match the predicted trace; is
        the literal irrelevant to the filter, every remaining precondition and
        the goal; otherwise revalidate the remaining suffix from the believed
        state. The answer is computed against the knowledge base as of this
        update's seq, so asking later reproduces the same justification. A
        failing revalidation raises RevalidationFailed: that observation does
        break the plan and the violation path takes over.
        """
        at = update.at_plan_index
        if update.op in (OP_ADD, OP_REMOVE):
            predicted = self.predicted_state(at)
            prop = self.task.atom_id(update.literal)
            holds = prop is not None and prop in predicted
            if (update.op == OP_ADD and holds) or (update.op == OP_REMOVE and not holds):
                return NoReplanReport(reason="observation_expected", matched_state_index=min(at + 1, len(self.trace) - 1))
            if prop is None or (prop not in self.filter.facts and not self._relevant_later(prop, at)):
                return NoReplanReport(reason="not_in_filter", literal=update.literal)
        remaining = self.plan.steps[at + 1 :]
        revalidation = validate_plan(self.task, remaining, start=self.believed_state(at, up_to_seq=update.seq))
        if not revalidation.valid:
            raise RevalidationFailed(revalidation)
        return NoReplanReport(reason="still_valid", revalidation=revalidation)

    def _relevant_later(self, prop: int, at: int) -> bool:
        if prop in self.task.goal.pos or prop in self.task.goal.neg:
            return True
        for idx in range(at + 1, len(self.plan.steps)):
            act = self.task.actions[self.plan.steps[idx]]
            if prop in act.pre_pos or prop in act.pre_neg:
                return True
        return False

    def feed(self, updates: Iterable[KnowledgeBaseUpdate]) -> list[ViolationReport]:
        """Process a whole stream; returns the violations it raised."""
        reports = []
        for update in updates:
            report = self.process_update(update)
            if report is not None:
                reports.append(report)
        return reports
