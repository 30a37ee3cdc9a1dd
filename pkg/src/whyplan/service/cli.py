"""Command-line interface.

Stateless analysis commands (plan/ground/validate/why/whynot/monitor) read
PDDL and plan files directly; session commands (session/inject/ask) work
against a workspace directory of persisted sessions so a dialogue can span
invocations. Exit codes: 0 success, 1 domain errors, 2 usage errors.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from ..causal import why_action
from ..contrastive import whatif_forbid, whatif_require
from ..errors import WhyplanError
from ..monitor import MonitorSession, read_updates
from ..pddl.ground import ground_task
from ..pddl.parser import parse_domain, parse_problem
from ..pddl.printer import format_fraction
from ..planio import plan_to_json, read_plan, write_plan
from ..search import Heuristic, PlanFound, ResourceLimit, SearchConfig, Strategy, search_plan
from ..validate import Metric, validate_plan
from . import core
from .store import SessionStore

WORKSPACE_ENV = "WHYPLAN_WORKSPACE"


def _workspace(path: str | None) -> Path:
    return Path(path or os.environ.get(WORKSPACE_ENV) or ".whyplan")


class MissingInput(WhyplanError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"cannot read input file: {path}")

    def details(self):
        return {"path": self.path}


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as err:
        raise MissingInput(path) from err


def _load_task(domain_path: str, problem_path: str, prune: bool = True):
    domain = parse_domain(_read_file(domain_path))
    problem = parse_problem(_read_file(problem_path), domain)
    return domain, problem, ground_task(domain, problem, prune_static=prune)


def _echo_json(data) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _fail(err: WhyplanError) -> None:
    click.echo(json.dumps(err.payload()), err=True)
    sys.exit(1)


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except WhyplanError as err:
            _fail(err)


@click.group(cls=_Group)
def main() -> None:
    """Plan, validate and explain planner decisions over classical PDDL."""


dom_opt = click.option("--domain", "-d", "domain_path", required=True, type=click.Path(dir_okay=False))
prob_opt = click.option("--problem", "-p", "problem_path", required=True, type=click.Path(dir_okay=False))


@main.command("plan")
@click.argument("domain_path", type=click.Path(dir_okay=False))
@click.argument("problem_path", type=click.Path(dir_okay=False))
@click.option("--strategy", type=click.Choice([s.value for s in Strategy]), default="uniform")
@click.option("--heuristic", type=click.Choice([h.value for h in Heuristic]), default="zero")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="also write the plan file here")
@click.option("--json", "as_json", is_flag=True)
def cmd_plan(domain_path, problem_path, strategy, heuristic, output, as_json):
    """Find a plan and print it with its total cost."""
    _, _, task = _load_task(domain_path, problem_path)
    cfg = SearchConfig(strategy=Strategy(strategy), heuristic=Heuristic(heuristic))
    result = search_plan(task, task.init, task.goal, cfg)
    if isinstance(result, ResourceLimit):
        click.echo(f"search hit its {result.limit} limit after {result.explored_states} states", err=True)
        sys.exit(1)
    if not isinstance(result, PlanFound):
        click.echo(f"unsolvable: exhausted {result.explored_states} states", err=True)
        sys.exit(1)
    text = write_plan(task, result.plan)
    if output:
        Path(output).write_text(text)
    if as_json:
        _echo_json(plan_to_json(task, result.plan))
    else:
        click.echo(text, nl=False)


@main.command("ground")
@click.argument("domain_path", type=click.Path(dir_okay=False))
@click.argument("problem_path", type=click.Path(dir_okay=False))
@click.option("--no-prune", is_flag=True, help="keep statically impossible instantiations")
def cmd_ground(domain_path, problem_path, no_prune):
    """Dump the grounded task (one line per proposition and action)."""
    _, _, task = _load_task(domain_path, problem_path, prune=not no_prune)
    click.echo(task.dump(), nl=False)


@main.command("validate")
@click.argument("plan_path", type=click.Path(dir_okay=False))
@dom_opt
@prob_opt
@click.option("--metric", "metrics", multiple=True, default=("total_cost",), help="total_cost, plan_length or weighted_cost{schema:w,...}")
def cmd_validate(plan_path, domain_path, problem_path, metrics):
    """Simulate a plan, diagnose failures and score requested metrics."""
    _, _, task = _load_task(domain_path, problem_path)
    plan = read_plan(task, _read_file(plan_path))
    report = validate_plan(task, plan, metrics=[Metric.parse(m) for m in metrics])
    _echo_json(report.to_json())
    if not report.valid:
        sys.exit(1)


@main.command("why")
@click.argument("plan_path", type=click.Path(dir_okay=False))
@dom_opt
@prob_opt
@click.option("--step", required=True, type=int)
@click.option("--json", "as_json", is_flag=True)
def cmd_why(plan_path, domain_path, problem_path, step, as_json):
    """Why is this step in the plan? Causal links plus alternative achievers."""
    _, _, task = _load_task(domain_path, problem_path)
    plan = read_plan(task, _read_file(plan_path))
    answer = why_action(task, plan, step)
    if as_json:
        _echo_json(answer.to_json(task))
    else:
        click.echo(answer.text)


@main.command("whynot")
@dom_opt
@prob_opt
@click.option("--plan", "plan_path", type=click.Path(dir_okay=False), help="plan under discussion (default: plan fresh)")
@click.option("--forbid", "forbids", multiple=True, help="ground action label to remove, e.g. '(sample_rock r0 r0store w0)'")
@click.option("--require", "require_obj", help="object that must participate in the plan")
@click.option("--goal-achievers", is_flag=True, help="restrict the required participation to goal-achieving actions")
@click.option("--json", "as_json", is_flag=True)
def cmd_whynot(domain_path, problem_path, plan_path, forbids, require_obj, goal_achievers, as_json):
    """Why not do it another way? Replan under the user's constraint and compare."""
    domain, problem, task = _load_task(domain_path, problem_path)
    if plan_path:
        plan = read_plan(task, _read_file(plan_path))
    else:
        result = search_plan(task, task.init, task.goal, SearchConfig.oracle())
        if not isinstance(result, PlanFound):
            raise WhyplanError("the base problem is unsolvable; nothing to contrast")
        plan = result.plan
    if not forbids and not require_obj:
        raise click.UsageError("need --forbid and/or --require")
    if require_obj:
        compiled, report = whatif_require(
            domain, problem, require_obj, goal_achievers, plan, forbidden_labels=tuple(forbids)
        )
    else:
        compiled, report = task, None
        for label in forbids:
            compiled, report = whatif_forbid(compiled, compiled.find_action(label), plan)
    if as_json:
        data = {
            "constraint": report.constraint,
            "original_cost": format_fraction(report.original_cost),
            "solvable": report.solvable,
            "explored_states": report.explored_states,
            "text": report.text,
        }
        if report.solvable:
            data["alternative_cost"] = format_fraction(report.alternative_cost)
            data["alternative_plan"] = plan_to_json(compiled, report.alternative)
        _echo_json(data)
    else:
        click.echo(report.text)
        if report.solvable:
            click.echo(write_plan(compiled, report.alternative), nl=False)


@main.command("monitor")
@click.option("--plan", "plan_path", required=True, type=click.Path(dir_okay=False))
@click.option("--updates", "updates_path", required=True, type=click.Path(dir_okay=False))
@dom_opt
@prob_opt
@click.option("--explain-benign", is_flag=True, help="also justify updates that need no replanning")
def cmd_monitor(plan_path, updates_path, domain_path, problem_path, explain_benign):
    """Replay a knowledge-base update stream against an executing plan."""
    _, _, task = _load_task(domain_path, problem_path)
    plan = read_plan(task, _read_file(plan_path))
    session = MonitorSession(task, plan)
    click.echo(json.dumps({"filter": session.filter.to_json(task)}))
    failed = False
    for update in read_updates(_read_file(updates_path)):
        violation = session.process_update(update)
        record: dict = {"seq": update.seq, "violation": None}
        if violation is not None:
            failed = True
            record["violation"] = violation.to_json(task)
            record["explanation"] = session.explain_replan_needed(violation).text
        elif explain_benign:
            try:
                record["no_replan"] = session.explain_no_replan(update).to_json()
            except WhyplanError as err:
                record["no_replan"] = err.payload()
        click.echo(json.dumps(record))
    sys.exit(1 if failed else 0)


# ---------------------------------------------------------------------------
# session commands (workspace-backed)


@main.group("session")
def session_group() -> None:
    """Create, inspect, export and replay persisted explanation sessions."""


@session_group.command("new")
@dom_opt
@prob_opt
@click.option("--plan", "plan_path", type=click.Path(dir_okay=False), help="pin a dispatched plan instead of planning")
@click.option("--workspace", "-w", type=click.Path(file_okay=False))
def cmd_session_new(domain_path, problem_path, plan_path, workspace):
    store = SessionStore(_workspace(workspace))
    state = core.create_session(
        _read_file(domain_path),
        _read_file(problem_path),
        plan_text=_read_file(plan_path) if plan_path else "",
    )
    store.save(state)
    _echo_json(state.plan_payload())


@session_group.command("list")
@click.option("--workspace", "-w", type=click.Path(file_okay=False))
def cmd_session_list(workspace):
    store = SessionStore(_workspace(workspace))
    for sid in store.list_ids():
        click.echo(sid)


@session_group.command("export")
@click.option("--session", "-s", "session_id", help="defaults to the most recent session")
@click.option("--workspace", "-w", type=click.Path(file_okay=False))
def cmd_session_export(session_id, workspace):
    store = SessionStore(_workspace(workspace))
    state = store.load(session_id or store.latest())
    _echo_json(core.export_transcript(state))


@session_group.command("replay")
@click.argument("transcript_path", type=click.Path(dir_okay=False))
def cmd_session_replay(transcript_path):
    """Re-run an exported transcript; fails unless responses match exactly."""
    transcript = json.loads(_read_file(transcript_path))
    responses = core.replay_transcript(transcript)
    recorded = [e["response"] for e in transcript["events"]]
    identical = [core.canonical_json(a) == core.canonical_json(b) for a, b in zip(recorded, responses)]
    _echo_json({"events": len(responses), "identical": all(identical) and len(recorded) == len(responses)})
    if not all(identical):
        sys.exit(1)


@main.command("inject")
@click.option("--after", required=True, type=int)
@click.option("--action", "action_label", required=True)
@click.option("--allow-revisit", is_flag=True, help="let the replanner return to the pre-injection state")
@click.option("--session", "-s", "session_id")
@click.option("--workspace", "-w", type=click.Path(file_okay=False))
def cmd_inject(after, action_label, allow_revisit, session_id, workspace):
    """Inject a decision after a plan prefix and classify the outcome."""
    store = SessionStore(_workspace(workspace))
    sid = session_id or store.latest()
    with store.lock(sid):
        state = store.load(sid)
        response = core.inject(state, after, action_label, forbid_revisit=not allow_revisit)
        store.save(state)
    _echo_json(response)


@main.command("ask")
@click.argument("question")
@click.option("--session", "-s", "session_id")
@click.option("--workspace", "-w", type=click.Path(file_okay=False))
def cmd_ask(question, session_id, workspace):
    """Ask a question (JSON payload with a 'kind' of q1..q6) against a session."""
    try:
        payload = json.loads(question)
    except json.JSONDecodeError as err:
        raise click.UsageError(f"question must be JSON: {err}") from err
    store = SessionStore(_workspace(workspace))
    sid = session_id or store.latest()
    with store.lock(sid):
        state = store.load(sid)
        response = core.ask(state, payload)
        store.save(state)
    _echo_json(response)


@main.command("updates")
@click.argument("updates_path", type=click.Path(dir_okay=False))
@click.option("--session", "-s", "session_id")
@click.option("--workspace", "-w", type=click.Path(file_okay=False))
def cmd_updates(updates_path, session_id, workspace):
    """Feed a JSONL update stream into a session's execution monitor."""
    records = [u.to_json() for u in read_updates(_read_file(updates_path))]
    store = SessionStore(_workspace(workspace))
    sid = session_id or store.latest()
    with store.lock(sid):
        state = store.load(sid)
        response = core.feed_updates(state, records)
        store.save(state)
    _echo_json(response)


@main.command("serve")
@click.option("--workspace", "-w", type=click.Path(file_okay=False))
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8752, type=int)
@click.option("--console", "console_dir", type=click.Path(file_okay=False), help="also serve a built console from /console")
def cmd_serve(workspace, host, port, console_dir):
    """Start the HTTP JSON service."""
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(_workspace(workspace), console=console_dir), host=host, port=port)


if __name__ == "__main__":
    main()
