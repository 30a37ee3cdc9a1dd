"""Contrastive queries: forbid/require compilations and decision injection.

"Why not X?" is answered empirically: constrain the model so the planner must
respect the user's alternative, replan, and compare. A user decision can also
be injected mid-plan: execute a prefix, apply the suggested action, replan
from the resulting state, and classify what the replanner did:

  undo           it returned straight to the pre-injection state
  reconvergence  it rejoined the remaining original trajectory after k steps
  divergence     it reached a goal along states the original never visits
  failure        no plan exists from the post-injection state

For a reconvergence, C_A sums the original action at the injection point plus
the original steps up to the rejoin state, and C_B sums the injected action
plus the replanned steps to the same state; both are recomputable from the
carried action sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import NotApplicable, PrefixInvalid, UnknownObject
from .pddl.ground import GroundTask, ground_task
from .pddl.model import ActionSchema, Atom, DomainModel, Predicate, ProblemModel
from .pddl.printer import format_fraction
from .search import (
    Plan,
    PlanFound,
    SearchConfig,
    SearchResult,
    State,
    Unsolvable,
    apply_action,
    applicability_gap,
    make_plan,
    plan_cost,
    search_plan,
    trace_of,
)

# ---------------------------------------------------------------------------
# Model compilations


def compile_forbid_action(task: GroundTask, aid: int) -> GroundTask:
    """Remove one ground action from the table; its id is retired."""
    return task.without_action(aid)


def participation_marker(obj: str, domain: DomainModel) -> str:
    name = f"participated_{obj}"
    while domain.has_predicate(name):
        name += "_"
    return name


def compile_require_participation(
    domain: DomainModel, problem: ProblemModel, obj: str, restrict: bool
) -> tuple[DomainModel, ProblemModel]:
    """Force plans to include at least one action that binds `obj`.

    A fresh nullary predicate is appended to the goal. Each schema with a
    parameter that can bind `obj` is split into obj-bound clones (one per
    first-binding position, so instances are generated exactly once) that add
    the predicate, plus a residual variant whose parameters exclude `obj`.
    With `restrict`, only clone instances that add a positive goal literal
    receive the marker, so the dummy goal can only be reached by a
    goal-achieving action of `obj`.
    """
    known = {n for n, _ in problem.objects} | {n for n, _ in domain.constants}
    if obj not in known:
        raise UnknownObject(obj)
    obj_type = problem.object_type(obj, domain)
    marker = participation_marker(obj, domain)

    schemas: list[ActionSchema] = []
    for schema in domain.schemas:
        positions = [
            i
            for i, (_, want) in enumerate(schema.parameters)
            if domain.types.is_subtype(obj_type, want)
        ]
        if not positions:
            schemas.append(schema)
            continue
        names = schema.param_names
        residual_excluded = tuple(
            (names[i], tuple(sorted(set(schema.excluded_for(names[i])) | {obj}))) for i in positions
        )
        keep_excluded = tuple(e for e in schema.excluded if e[0] not in {names[i] for i in positions})
        schemas.append(replace(schema, excluded=keep_excluded + residual_excluded))
        for pos_idx, i in enumerate(positions):
            clone = schema.bind({names[i]: obj}, f"{schema.name}@{obj}_{i}")
            earlier = positions[:pos_idx]
            extra = tuple(
                (names[j], tuple(sorted(set(clone.excluded_for(names[j])) | {obj}))) for j in earlier
            )
            kept = tuple(e for e in clone.excluded if e[0] not in {names[j] for j in earlier})
            schemas.append(replace(clone, excluded=kept + extra, marker=marker, marker_goal_only=restrict))

    new_domain = replace(
        domain,
        predicates=domain.predicates + (Predicate(marker, ()),),
        schemas=tuple(schemas),
    )
    new_problem = replace(problem, goal_pos=problem.goal_pos | {Atom(marker, ())})
    return new_domain, new_problem


# ---------------------------------------------------------------------------
# Query descriptions


@dataclass(frozen=True)
class ContrastiveQuery:
    """What the user asked for: forbid an action, require an object, or
    inject a decision after a plan prefix."""

    kind: str  # forbid_action | require_participation | inject_decision
    action: int | None = None
    obj: str | None = None
    restrict_to_goal_achievers: bool = False
    prefix_length: int | None = None
    comparison_metrics: tuple = ()

    @staticmethod
    def forbid(action: int) -> "ContrastiveQuery":
        return ContrastiveQuery(kind="forbid_action", action=action)

    @staticmethod
    def require(obj: str, restrict: bool = False) -> "ContrastiveQuery":
        return ContrastiveQuery(kind="require_participation", obj=obj, restrict_to_goal_achievers=restrict)

    @staticmethod
    def injection(prefix_length: int, action: int) -> "ContrastiveQuery":
        return ContrastiveQuery(kind="inject_decision", prefix_length=prefix_length, action=action)


# ---------------------------------------------------------------------------
# Injection outcomes


@dataclass(frozen=True)
class UndoOutcome:
    return_step: int  # replanned actions executed before re-reaching the injection state


@dataclass(frozen=True)
class ReconvergenceOutcome:
    k: int  # replanned steps (after the injected action) to the rejoin state
    original_suffix_start: int  # original step index where the shared suffix resumes
    c_a: Fraction
    c_b: Fraction
    alpha: tuple[int, ...]  # original actions after A up to the rejoin state
    beta: tuple[int, ...]  # replanned actions up to the rejoin state


@dataclass(frozen=True)
class DivergenceOutcome:
    alternative_plan: Plan  # injected action plus the replanned completion
    original_cost: Fraction  # cost of the original completion from the injection state
    alternative_cost: Fraction


@dataclass(frozen=True)
class FailureOutcome:
    explored_states: int


Variant = UndoOutcome | ReconvergenceOutcome | DivergenceOutcome | FailureOutcome


@dataclass(frozen=True)
class InjectionOutcome:
    variant: Variant
    injected_action: int
    injection_state: State
    prefix_length: int

    @property
    def kind(self) -> str:
        return {
            UndoOutcome: "undo",
            ReconvergenceOutcome: "reconvergence",
            DivergenceOutcome: "divergence",
            FailureOutcome: "failure",
        }[type(self.variant)]

    def to_json(self, task: GroundTask) -> dict:
        body: dict = {"variant": self.kind, "injected": task.actions[self.injected_action].label, "after": self.prefix_length}
        v = self.variant
        if isinstance(v, UndoOutcome):
            body["return_step"] = v.return_step
        elif isinstance(v, ReconvergenceOutcome):
            body.update(
                {
                    "k": v.k,
                    "original_suffix_start": v.original_suffix_start,
                    "C_A": format_fraction(v.c_a),
                    "C_B": format_fraction(v.c_b),
                    "alpha": [task.actions[a].label for a in v.alpha],
                    "beta": [task.actions[a].label for a in v.beta],
                }
            )
        elif isinstance(v, DivergenceOutcome):
            body.update(
                {
                    "alternative_plan": [task.actions[a].label for a in v.alternative_plan.steps],
                    "original_cost": format_fraction(v.original_cost),
                    "alternative_cost": format_fraction(v.alternative_cost),
                }
            )
        else:
            body["explored_states"] = v.explored_states
        body["text"] = self.render(task)
        return body

    def render(self, task: GroundTask) -> str:
        label = task.actions[self.injected_action].label
        v = self.variant
        if isinstance(v, UndoOutcome):
            return (
                f"after injecting {label} the planner walks straight back: it re-reaches the "
                f"pre-injection state after {v.return_step} step(s) and resumes the original plan"
            )
        if isinstance(v, ReconvergenceOutcome):
            rel = "worse than" if v.c_b > v.c_a else ("equal to" if v.c_b == v.c_a else "better than")
            return (
                f"after injecting {label} the plan rejoins the original trajectory after {v.k} step(s); "
                f"the original route costs C_A={format_fraction(v.c_a)} and the injected route costs "
                f"C_B={format_fraction(v.c_b)}, so the alternative is {rel} the planner's choice"
            )
        if isinstance(v, DivergenceOutcome):
            rel = "worse than" if v.alternative_cost > v.original_cost else ("equal to" if v.alternative_cost == v.original_cost else "better than")
            return (
                f"after injecting {label} the planner reaches the goal along a different trajectory; "
                f"completing the original way costs {format_fraction(v.original_cost)} versus "
                f"{format_fraction(v.alternative_cost)} for the alternative, which is {rel} the planner's choice"
            )
        return (
            f"after injecting {label} no plan reaches the goal: the search exhausted "
            f"{v.explored_states} state(s) without success, so the suggestion leads to a dead end"
        )


def classify_outcome(
    original_trace: list[State],
    original_steps: tuple[int, ...],
    injection_index: int,
    result: SearchResult,
    task: GroundTask,
    injected_action: int,
) -> Variant:
    """Map a replanning result to one of the four behaviours.

    The replanned trajectory is scanned forward for the first state that is
    either the injection state itself (undo) or an original state at or after
    the injection point (reconvergence). Earlier original states do not count
    as meets: rejoining the past is not one of the behaviours of interest, and
    treating it as one would make undo reachable even with revisiting
    forbidden. Anything that reaches the goal without such a meet diverges.
    """
    if isinstance(result, Unsolvable):
        return FailureOutcome(explored_states=result.explored_states)
    if not isinstance(result, PlanFound):
        raise PrefixInvalid(f"replanning hit its {result.limit} limit; the outcome cannot be classified")

    s = original_trace[injection_index]
    new_plan = result.plan
    r1 = apply_action(task, s, injected_action)
    new_trace = trace_of(task, r1, new_plan)

    post_index: dict[State, int] = {}
    for idx in range(len(original_trace) - 1, injection_index, -1):
        post_index[original_trace[idx]] = idx

    b_cost = task.actions[injected_action].cost
    for j, state in enumerate(new_trace):
        if state == s:
            return UndoOutcome(return_step=j)
        if state in post_index:
            m = post_index[state]
            alpha = tuple(original_steps[injection_index + 1 : m])
            beta = tuple(new_plan.steps[:j])
            c_a = task.actions[original_steps[injection_index]].cost + plan_cost(task, alpha)
            c_b = b_cost + plan_cost(task, beta)
            return ReconvergenceOutcome(
                k=j,
                original_suffix_start=m,
                c_a=c_a,
                c_b=c_b,
                alpha=alpha,
                beta=beta,
            )

    original_cost = plan_cost(task, original_steps[injection_index:])
    alternative = make_plan(task, (injected_action,) + new_plan.steps)
    return DivergenceOutcome(
        alternative_plan=alternative,
        original_cost=original_cost,
        alternative_cost=alternative.total_cost,
    )


# ---------------------------------------------------------------------------
# Interactive session: a stack of accepted injections


@dataclass
class InjectionLayer:
    query: ContrastiveQuery
    outcome: InjectionOutcome
    base_state: State  # state the questioned plan started from
    base_plan: Plan  # the plan the prefix indexes into
    completion: Plan  # replanned plan from the post-injection state (empty on failure)

    @property
    def prefix_length(self) -> int:
        return self.query.prefix_length

    @property
    def injected_action(self) -> int:
        return self.query.action


@dataclass
class ContrastiveSession:
    """One interactive dialogue: a plan plus a stack of accepted injections.

    Each layer executes a prefix of the then-current plan, applies the
    injected action and replans; popping a layer restores the previous state
    exactly (stack discipline).
    """

    task: GroundTask
    original_plan: Plan
    layers: list[InjectionLayer] = field(default_factory=list)

    @property
    def current_state(self) -> State:
        """State from which the current plan runs (init + accepted injections)."""
        if not self.layers:
            return self.task.init
        top = self.layers[-1]
        state = top.base_state
        for aid in top.base_plan.steps[: top.prefix_length]:
            state = apply_action(self.task, state, aid)
        return apply_action(self.task, state, top.injected_action)

    @property
    def current_plan(self) -> Plan:
        if not self.layers:
            return self.original_plan
        return self.layers[-1].completion

    @property
    def depth(self) -> int:
        return len(self.layers)

    def pop(self) -> InjectionLayer:
        if not self.layers:
            raise PrefixInvalid("no injection to pop")
        return self.layers.pop()


def inject_and_replan(
    session: ContrastiveSession,
    prefix_length: int,
    injected_action: int,
    forbid_revisit: bool = True,
    cfg: SearchConfig | None = None,
) -> InjectionOutcome:
    """Execute the current plan up to `prefix_length`, apply the user's
    action, replan from the resulting state and classify the behaviour.

    With `forbid_revisit`, the pre-injection state is added to the forbidden
    set so the replanner cannot trivially undo the user's decision. An
    injected action that is not applicable raises NotApplicable carrying the
    exact unsatisfied literals: that diagnosis is itself the answer to "why
    can't you do that" and is surfaced as such by the service layer.
    """
    cfg = cfg or SearchConfig.oracle()
    task = session.task
    plan = session.current_plan
    if not 0 <= prefix_length <= len(plan.steps):
        raise PrefixInvalid(f"prefix length {prefix_length} out of range for plan of length {len(plan.steps)}")

    base = session.current_state
    try:
        prefix_trace = trace_of(task, base, plan.steps[:prefix_length])
    except NotApplicable as exc:
        raise PrefixInvalid(str(exc)) from exc
    s = prefix_trace[-1]

    missing, violated = applicability_gap(task, s, injected_action)
    if missing or violated:
        raise NotApplicable(missing, violated, step=prefix_length)

    r1 = apply_action(task, s, injected_action)
    original_trace = trace_of(task, base, plan)
    if r1 == s:
        # the suggestion changes nothing: we are back at the injection state
        # before any replanning happens, which is an undo by definition and
        # the one case revisit-forbidding cannot (and need not) prevent
        variant: Variant = UndoOutcome(return_step=0)
        result: SearchResult = PlanFound(plan=make_plan(task, plan.steps[prefix_length:]))
    else:
        forbidden = cfg.forbidden_states | {s} if forbid_revisit else cfg.forbidden_states
        cfg2 = replace(cfg, forbidden_states=forbidden)
        result = search_plan(task, r1, task.goal, cfg2)
        variant = classify_outcome(original_trace, plan.steps, prefix_length, result, task, injected_action)
    outcome = InjectionOutcome(
        variant=variant,
        injected_action=injected_action,
        injection_state=s,
        prefix_length=prefix_length,
    )
    completion = result.plan if isinstance(result, PlanFound) else make_plan(task, ())
    session.layers.append(
        InjectionLayer(
            query=ContrastiveQuery.injection(prefix_length, injected_action),
            outcome=outcome,
            base_state=base,
            base_plan=plan,
            completion=completion,
        )
    )
    return outcome


# ---------------------------------------------------------------------------
# Whole-plan what-if comparisons (forbid / require)


@dataclass
class WhatIfReport:
    """Replanning comparison for a forbid/require query."""

    constraint: str
    original_plan: Plan
    original_cost: Fraction
    alternative: Plan | None
    alternative_cost: Fraction | None
    explored_states: int
    text: str = ""

    @property
    def solvable(self) -> bool:
        return self.alternative is not None


def whatif_forbid(task: GroundTask, aid: int, original: Plan, cfg: SearchConfig | None = None) -> tuple[GroundTask, WhatIfReport]:
    cfg = cfg or SearchConfig.oracle()
    label = task.actions[aid].label
    compiled = compile_forbid_action(task, aid)
    result = search_plan(compiled, compiled.init, compiled.goal, cfg)
    report = _whatif_report(compiled, f"forbid {label}", original, result)
    if report.solvable:
        rel = "a worse" if report.alternative_cost > report.original_cost else (
            "an equally good" if report.alternative_cost == report.original_cost else "a better"
        )
        report.text = (
            f"without {label} the best plan costs {format_fraction(report.alternative_cost)} "
            f"versus {format_fraction(report.original_cost)}: not using it leads to {rel} plan"
        )
    else:
        report.text = (
            f"no plan exists without {label}: the search exhausted {report.explored_states} state(s); "
            "that action is indispensable"
        )
    return compiled, report


def whatif_require(
    domain: DomainModel,
    problem: ProblemModel,
    obj: str,
    restrict: bool,
    original: Plan,
    forbidden_labels: tuple[str, ...] = (),
    cfg: SearchConfig | None = None,
    prune_static: bool = True,
) -> tuple[GroundTask, WhatIfReport]:
    """Replan with `obj` forced to participate (optionally only through
    goal-achieving actions), on top of previously forbidden ground actions.

    `original` is the plan being questioned; only its cost enters the report.
    """
    cfg = cfg or SearchConfig.oracle()
    new_domain, new_problem = compile_require_participation(domain, problem, obj, restrict)
    compiled = ground_task(new_domain, new_problem, prune_static=prune_static)
    for label in forbidden_labels:
        compiled = compiled.without_action(compiled.find_action(label))
    result = search_plan(compiled, compiled.init, compiled.goal, cfg)
    what = "a goal-achieving action" if restrict else "at least one action"
    report = _whatif_report(compiled, f"require {obj} to perform {what}", original, result)
    if report.solvable:
        report.text = (
            f"requiring {obj} to participate yields a plan of cost "
            f"{format_fraction(report.alternative_cost)} (original {format_fraction(report.original_cost)})"
        )
    else:
        does = "achieves a goal" if restrict else "participates"
        blocked = f" while {', '.join(forbidden_labels)} is forbidden" if forbidden_labels else ""
        report.text = (
            f"I cannot find a plan in which {obj} {does}{blocked}: "
            f"the search exhausted {report.explored_states} state(s)"
        )
    return compiled, report


def _whatif_report(task: GroundTask, constraint: str, original: Plan, result: SearchResult) -> WhatIfReport:
    if isinstance(result, PlanFound):
        return WhatIfReport(
            constraint=constraint,
            original_plan=original,
            original_cost=original.total_cost,
            alternative=result.plan,
            alternative_cost=result.plan.total_cost,
            explored_states=result.explored_states,
        )
    return WhatIfReport(
        constraint=constraint,
        original_plan=original,
        original_cost=original.total_cost,
        alternative=None,
        alternative_cost=None,
        explored_states=result.explored_states,
    )
