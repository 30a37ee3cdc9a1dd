"""Text and JSON forms of plans.

Plan text format, one action per line plus a trailing cost line:

    0: (navigate r1 w2 w0) [cost=5]
    1: (sample_rock r0 r0store w0) [cost=8]
    ; total_cost=13
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import PddlSyntaxError
from .pddl.ground import GroundTask
from .pddl.printer import format_fraction
from .search import Plan, make_plan

_STEP_RE = re.compile(r"^\s*(\d+)\s*:\s*(\([^)]*\))\s*(?:\[cost=([^\]]+)\])?\s*$")
_TOTAL_RE = re.compile(r"^\s*;\s*total_cost=(\S+)\s*$")


def write_plan(task: GroundTask, plan: Plan) -> str:
    lines = []
    for i, aid in enumerate(plan.steps):
        act = task.actions[aid]
        lines.append(f"{i}: {act.label} [cost={format_fraction(act.cost)}]")
    lines.append(f"; total_cost={format_fraction(plan.total_cost)}")
    return "\n".join(lines) + "\n"


def read_plan(task: GroundTask, text: str) -> Plan:
    """Parse the plan format back into action ids for `task`."""
    steps: list[int] = []
    total: Fraction | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        m = _TOTAL_RE.match(line)
        if m:
            total = Fraction(m.group(1))
            continue
        if line.lstrip().startswith(";"):
            continue
        m = _STEP_RE.match(line)
        if not m:
            raise PddlSyntaxError(lineno, 1, "a plan step like '0: (name args) [cost=c]'", line.strip())
        steps.append(task.find_action(m.group(2)))
    plan = make_plan(task, steps)
    if total is not None and total != plan.total_cost:
        raise PddlSyntaxError(0, 0, f"total_cost {format_fraction(plan.total_cost)}", format_fraction(total))
    return plan


def plan_to_json(task: GroundTask, plan: Plan) -> dict:
    return {
        "steps": [
            {"index": i, "action": task.actions[aid].label, "cost": format_fraction(task.actions[aid].cost)}
            for i, aid in enumerate(plan.steps)
        ],
        "total_cost": format_fraction(plan.total_cost),
        "length": len(plan.steps),
    }
