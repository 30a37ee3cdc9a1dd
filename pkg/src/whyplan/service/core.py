"""Session orchestration shared by the CLI and the HTTP service.

A session owns one parsed+grounded task, its plan, a stack of accepted
decision injections and an optional execution monitor. Questions are
dispatched here so both transports produce byte-identical answers, and every
interaction is appended to a transcript from which the whole session can be
replayed deterministically.
"""

from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

from ..causal import why_action
from ..contrastive import (
    ContrastiveSession,
    inject_and_replan,
    whatif_forbid,
    whatif_require,
)
from ..errors import NotApplicable, RevalidationFailed, WhyplanError
from ..monitor import KnowledgeBaseUpdate, MonitorSession
from ..pddl.ground import ground_task
from ..pddl.parser import parse_domain, parse_problem
from ..pddl.printer import format_fraction
from ..planio import plan_to_json
from ..search import (
    Heuristic,
    PlanFound,
    SearchConfig,
    Strategy,
    Unsolvable,
    apply_action,
    search_plan,
)
from ..validate import Metric, validate_plan

SCHEMA_VERSION = 1


class StaleStateVersion(WhyplanError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"session is at version {actual}, request was computed against {expected}")

    def details(self) -> dict[str, Any]:
        return {"expected": self.expected, "actual": self.actual}


class SessionUnsolvable(WhyplanError):
    def __init__(self, explored: int):
        self.explored = explored
        super().__init__(f"no plan exists for this task (search exhausted {explored} states)")

    def details(self) -> dict[str, Any]:
        return {"explored_states": self.explored}


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _search_config(payload: dict | None) -> SearchConfig:
    payload = payload or {}
    return SearchConfig(
        strategy=Strategy(payload.get("strategy", "uniform")),
        heuristic=Heuristic(payload.get("heuristic", "zero")),
        node_limit=int(payload.get("node_limit", 10**6)),
        time_limit=float(payload.get("time_limit", 60.0)),
    )


@dataclass
class SessionState:
    """In-memory form of one session; persisted as plain JSON."""

    session_id: str
    domain_text: str
    problem_text: str
    search: dict
    created: str
    updated: str
    plan_text: str = ""  # optional pinned plan; empty means plan from scratch
    state_version: int = 1
    injections: list[dict] = field(default_factory=list)
    update_records: list[dict] = field(default_factory=list)
    transcript: list[dict] = field(default_factory=list)

    # derived, rebuilt on load
    domain: Any = None
    problem: Any = None
    task: Any = None
    digest: str = ""
    contrastive: ContrastiveSession | None = None
    monitor: MonitorSession | None = None

    def rebuild(self) -> None:
        """Recompute all derived state from sources and the event log."""
        self.domain = parse_domain(self.domain_text)
        self.problem = parse_problem(self.problem_text, self.domain)
        self.task = ground_task(self.domain, self.problem)
        self.digest = hashlib.sha256(self.task.dump().encode()).hexdigest()
        cfg = _search_config(self.search)
        if self.plan_text:
            from ..planio import read_plan

            plan = read_plan(self.task, self.plan_text)
            report = validate_plan(self.task, plan)
            if not report.valid:
                raise WhyplanError("the supplied plan does not validate: " + canonical_json(report.failure.to_json()))
        else:
            result = search_plan(self.task, self.task.init, self.task.goal, cfg)
            if not isinstance(result, PlanFound):
                raise SessionUnsolvable(result.explored_states)
            plan = result.plan
        self.contrastive = ContrastiveSession(self.task, plan)
        for record in self.injections:
            inject_and_replan(
                self.contrastive,
                record["after"],
                self.task.find_action(record["action"]),
                forbid_revisit=record.get("forbid_revisit", True),
                cfg=cfg,
            )
        self.monitor = None
        if self.update_records:
            self.monitor = MonitorSession(self.task, self.contrastive.original_plan)
            for record in self.update_records:
                self.monitor.process_update(KnowledgeBaseUpdate.from_json(record))

    # -- views ---------------------------------------------------------------

    @property
    def plan(self):
        return self.contrastive.current_plan

    def plan_payload(self) -> dict:
        task = self.task
        plan = self.contrastive.original_plan
        links = []
        try:
            from ..causal import extract_causal_links

            links = [l.to_json(task) for l in extract_causal_links(task, plan)]
        except WhyplanError:
            links = []
        return {
            "schema_version": SCHEMA_VERSION,
            "session": self.session_id,
            "state_version": self.state_version,
            "digest": self.digest,
            "plan": plan_to_json(task, plan),
            "links": links,
            "injections": [dict(r) for r in self.injections],
            "current_plan": plan_to_json(task, self.plan),
        }

    def to_record(self) -> dict:
        from ..planio import write_plan

        return {
            "schema_version": SCHEMA_VERSION,
            "id": self.session_id,
            "plan": write_plan(self.task, self.contrastive.original_plan),
            "created": self.created,
            "updated": self.updated,
            "state_version": self.state_version,
            "search": self.search,
            "domain": self.domain_text,
            "problem": self.problem_text,
            "plan_text": self.plan_text,
            "digest": self.digest,
            "injections": self.injections,
            "updates": self.update_records,
            "transcript": self.transcript,
        }

    @staticmethod
    def from_record(record: dict) -> "SessionState":
        state = SessionState(
            session_id=record["id"],
            domain_text=record["domain"],
            problem_text=record["problem"],
            search=record.get("search", {}),
            created=record["created"],
            updated=record["updated"],
            plan_text=record.get("plan_text", ""),
            state_version=record.get("state_version", 1),
            injections=list(record.get("injections", [])),
            update_records=list(record.get("updates", [])),
            transcript=list(record.get("transcript", [])),
        )
        state.rebuild()
        return state


def create_session(
    domain_text: str,
    problem_text: str,
    search: dict | None = None,
    session_id: str | None = None,
    plan_text: str = "",
) -> SessionState:
    state = SessionState(
        session_id=session_id or uuid.uuid4().hex[:12],
        domain_text=domain_text,
        problem_text=problem_text,
        search=search or {},
        created=_now(),
        updated=_now(),
        plan_text=plan_text,
    )
    state.rebuild()
    state.transcript.append({"event": "plan", "response": state.plan_payload()})
    return state


# ---------------------------------------------------------------------------
# question dispatch


def ask(state: SessionState, question: dict, state_version: int | None = None) -> dict:
    """Answer one q1..q6 question against the session's current state."""
    if state_version is not None and state_version != state.state_version:
        raise StaleStateVersion(state_version, state.state_version)
    kind = question.get("kind")
    handlers = {
        "q1": _ask_why,
        "q2": _ask_why_not,
        "q3": _ask_metric,
        "q4": _ask_cannot,
        "q5": _ask_replan,
        "q6": _ask_no_replan,
    }
    if kind not in handlers:
        raise WhyplanError(f"unknown question kind {kind!r} (expected q1..q6)")
    evidence, text = handlers[kind](state, question)
    response = {
        "schema_version": SCHEMA_VERSION,
        "session": state.session_id,
        "question": question,
        "state_version": state.state_version,
        "evidence": evidence,
        "text": text,
    }
    state.transcript.append({"event": "ask", "request": question, "response": response})
    return response


def _ask_why(state: SessionState, question: dict) -> tuple[dict, str]:
    step = int(question["step"])
    answer = why_action(state.task, state.plan, step, start=state.contrastive.current_state)
    return answer.to_json(state.task), answer.text


def _ask_why_not(state: SessionState, question: dict) -> tuple[dict, str]:
    task = state.task
    plan = state.plan
    cfg = _search_config(state.search)
    forbid_labels = question.get("forbid") or []
    if isinstance(forbid_labels, str):
        forbid_labels = [forbid_labels]
    if question.get("require"):
        compiled, report = whatif_require(
            state.domain,
            state.problem,
            question["require"],
            bool(question.get("goal_achievers", False)),
            plan,
            forbidden_labels=tuple(forbid_labels),
            cfg=cfg,
        )
    else:
        if not forbid_labels:
            raise WhyplanError("q2 needs 'forbid' and/or 'require'")
        compiled = task
        report = None
        for label in forbid_labels:
            compiled, report = whatif_forbid(compiled, compiled.find_action(label), plan, cfg=cfg)
    evidence = {
        "constraint": report.constraint,
        "original_cost": format_fraction(report.original_cost),
        "original_plan": plan_to_json(task, plan),
        "solvable": report.solvable,
        "explored_states": report.explored_states,
    }
    if report.solvable:
        evidence["alternative_plan"] = plan_to_json(compiled, report.alternative)
        evidence["alternative_cost"] = format_fraction(report.alternative_cost)
    return evidence, report.text


def _parse_metrics(raw) -> list[Metric]:
    metrics = [Metric.parse(m) for m in (raw or ["total_cost"])]
    return metrics or [Metric.total_cost()]


def _ask_metric(state: SessionState, question: dict) -> tuple[dict, str]:
    task = state.task
    start = state.contrastive.current_state
    metrics = _parse_metrics(question.get("metrics"))
    report = validate_plan(task, state.plan, metrics=metrics, start=start)
    evidence: dict = {"plan": report.to_json()}
    texts = [
        f"under {m} the current plan scores {format_fraction(v)}"
        for m, v in sorted(report.metric_values.items(), key=lambda kv: str(kv[0]))
    ]
    alternative = question.get("alternative")
    if alternative:
        steps = tuple(task.find_action(label) for label in alternative)
        alt_report = validate_plan(task, steps, metrics=metrics, start=start)
        evidence["alternative"] = alt_report.to_json()
        if not alt_report.valid:
            texts.append("the suggested alternative does not execute: " + canonical_json(alt_report.failure.to_json()))
        else:
            for metric in metrics:
                mine, theirs = report.metric_values[metric], alt_report.metric_values[metric]
                rel = "better than" if mine < theirs else ("equal to" if mine == theirs else "worse than")
                texts.append(
                    f"under {metric} the plan scores {format_fraction(mine)}, {rel} the alternative's {format_fraction(theirs)}"
                )
    return evidence, "; ".join(texts)


def _ask_cannot(state: SessionState, question: dict) -> tuple[dict, str]:
    task = state.task
    label = question["action"]
    aid = task.find_action(label)
    current = state.contrastive.current_state
    from ..validate import explain_inapplicable

    missing, violated = explain_inapplicable(task, current, aid)
    if missing or violated:
        evidence = {
            "reason": "precondition",
            "missing": [str(a) for a in missing],
            "violated": [str(a) for a in violated],
        }
        parts = []
        if missing:
            parts.append("it needs " + ", ".join(str(a) for a in missing))
        if violated:
            parts.append("it requires not " + ", ".join(str(a) for a in violated))
        return evidence, f"{label} cannot be applied now: " + " and ".join(parts)
    after = apply_action(task, current, aid)
    result = search_plan(task, after, task.goal, _search_config(state.search))
    if isinstance(result, Unsolvable):
        evidence = {"reason": "dead_end", "explored_states": result.explored_states}
        return evidence, (
            f"{label} is applicable, but afterwards the goal becomes unreachable: "
            f"the search exhausted {result.explored_states} state(s)"
        )
    if isinstance(result, PlanFound):
        evidence = {"reason": "possible", "completion_cost": format_fraction(result.plan.total_cost)}
        return evidence, f"{label} is possible: a completion of cost {format_fraction(result.plan.total_cost)} exists"
    evidence = {"reason": "resource_limit", "explored_states": result.explored_states}
    return evidence, "the search hit its resource limit before settling the question"


def _monitor_or_fail(state: SessionState) -> MonitorSession:
    if state.monitor is None:
        raise WhyplanError("no execution updates have been recorded for this session")
    return state.monitor


def _ask_replan(state: SessionState, question: dict) -> tuple[dict, str]:
    monitor = _monitor_or_fail(state)
    if not monitor.violations:
        raise WhyplanError("no filter violation has been raised; nothing requires replanning")
    seq = question.get("seq")
    if seq is None:
        report = monitor.violations[-1]
    else:
        matches = [v for v in monitor.violations if v.update_seq == int(seq)]
        if not matches:
            raise WhyplanError(f"no violation was raised by update {seq}")
        report = matches[0]
    answer = monitor.explain_replan_needed(report)
    return answer.evidence, answer.text


def _ask_no_replan(state: SessionState, question: dict) -> tuple[dict, str]:
    monitor = _monitor_or_fail(state)
    seq = question.get("seq")
    candidates = [u for u in monitor.updates if seq is None or u.seq == int(seq)]
    if not candidates:
        raise WhyplanError(f"no update with seq {seq} has been processed")
    update = candidates[-1]
    try:
        report = monitor.explain_no_replan(update)
    except RevalidationFailed as err:
        evidence = {"reason": "revalidation_failed", "revalidation": err.report.to_json()}
        return evidence, (
            "replanning is needed after all: the remaining plan no longer executes "
            "under the observed state"
        )
    reasons = {
        "observation_expected": "the observation matches the predicted state at this point; nothing diverged",
        "not_in_filter": "the change touches nothing the remaining plan depends on",
        "still_valid": "the remaining plan still executes and reaches the goal despite the change",
    }
    return report.to_json(), reasons[report.reason]


# ---------------------------------------------------------------------------
# session mutations


def inject(state: SessionState, after: int, action_label: str, forbid_revisit: bool = True) -> dict:
    """Apply a user decision after a plan prefix; classify and record it.

    An inapplicable action is not an error at this level: the diagnosis is the
    Q4 answer and is returned in place of an outcome.
    """
    task = state.task
    cfg = _search_config(state.search)
    aid = task.find_action(action_label)
    try:
        outcome = inject_and_replan(state.contrastive, after, aid, forbid_revisit=forbid_revisit, cfg=cfg)
    except NotApplicable as err:
        response = {
            "schema_version": SCHEMA_VERSION,
            "session": state.session_id,
            "state_version": state.state_version,
            "outcome": {
                "variant": "inapplicable",
                "injected": action_label,
                "after": after,
                "missing": [str(a) for a in err.missing_pos],
                "violated": [str(a) for a in err.violated_neg],
                "text": f"{action_label} cannot be applied at step {after}: " + str(err),
            },
        }
        state.transcript.append(
            {"event": "inject", "request": {"after": after, "action": action_label, "forbid_revisit": forbid_revisit}, "response": response}
        )
        return response
    state.injections.append({"after": after, "action": action_label, "forbid_revisit": forbid_revisit})
    state.state_version += 1
    state.updated = _now()
    response = {
        "schema_version": SCHEMA_VERSION,
        "session": state.session_id,
        "state_version": state.state_version,
        "outcome": outcome.to_json(task),
        "current_plan": plan_to_json(task, state.plan),
    }
    state.transcript.append(
        {"event": "inject", "request": {"after": after, "action": action_label, "forbid_revisit": forbid_revisit}, "response": response}
    )
    return response


def pop_injection(state: SessionState) -> dict:
    state.contrastive.pop()
    state.injections.pop()
    state.state_version += 1
    state.updated = _now()
    response = {
        "schema_version": SCHEMA_VERSION,
        "session": state.session_id,
        "state_version": state.state_version,
        "depth": state.contrastive.depth,
        "current_plan": plan_to_json(state.task, state.plan),
    }
    state.transcript.append({"event": "pop", "response": response})
    return response


def feed_updates(state: SessionState, updates: list[dict]) -> dict:
    """Process a chunk of knowledge-base updates against the session plan."""
    if state.monitor is None:
        state.monitor = MonitorSession(state.task, state.contrastive.original_plan)
    results = []
    for record in updates:
        update = KnowledgeBaseUpdate.from_json(record)
        violation = state.monitor.process_update(update)
        item: dict = {"seq": update.seq, "violation": None}
        if violation is not None:
            item["violation"] = violation.to_json(state.task)
        results.append(item)
        state.update_records.append(update.to_json())
    state.state_version += 1
    state.updated = _now()
    response = {
        "schema_version": SCHEMA_VERSION,
        "session": state.session_id,
        "state_version": state.state_version,
        "results": results,
        "filter": state.monitor.filter.to_json(state.task),
    }
    state.transcript.append({"event": "updates", "request": {"updates": updates}, "response": response})
    return response


# ---------------------------------------------------------------------------
# transcripts and replay


def export_transcript(state: SessionState) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "session": state.session_id,
        "search": state.search,
        "sources": {"domain": state.domain_text, "problem": state.problem_text, "plan": state.plan_text},
        "events": list(state.transcript),
    }


def replay_transcript(transcript: dict) -> list[dict]:
    """Re-run every recorded event on a fresh session; returns the responses.

    Replays are deterministic: identical requests against identical sources
    produce byte-identical responses (timestamps live outside responses).
    """
    sources = transcript["sources"]
    state = create_session(
        sources["domain"],
        sources["problem"],
        search=transcript.get("search", {}),
        session_id=transcript["session"],
        plan_text=sources.get("plan", ""),
    )
    responses: list[dict] = []
    for event in transcript["events"]:
        kind = event["event"]
        if kind == "plan":
            responses.append(state.plan_payload())
        elif kind == "ask":
            responses.append(ask(state, event["request"]))
        elif kind == "inject":
            req = event["request"]
            responses.append(inject(state, req["after"], req["action"], req.get("forbid_revisit", True)))
        elif kind == "pop":
            responses.append(pop_injection(state))
        elif kind == "updates":
            responses.append(feed_updates(state, event["request"]["updates"]))
        else:
            raise WhyplanError(f"unknown transcript event {kind!r}")
    return responses
