from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction

import pytest

from whyplan import Atom, Metric, evaluate_metric, explain_inapplicable, make_plan, validate_plan
from whyplan.errors import InvalidPlan
from whyplan.pddl.ground import Goal
from whyplan.search import PlanFound, SearchConfig, apply_action, search_plan

from .oracles import oracle_optimal, oracle_simulate
from .random_tasks import make_task, random_task


def goal_of(task, *literals):
    return Goal(pos=frozenset(task.atom_id(Atom.parse(l)) for l in literals), neg=frozenset())


def test_two_step_plan_valid_with_metrics(rover_task):
    t = replace(
        rover_task,
        goal=Goal(
            pos=frozenset(
                [
                    rover_task.atom_id(Atom.parse("(soil_analysed w2)")),
                    rover_task.atom_id(Atom.parse("(at r1 w0)")),
                ]
            ),
            neg=frozenset(),
        ),
    )
    steps = (t.find_action("(sample_soil r1 r1store w2)"), t.find_action("(navigate r1 w2 w0)"))
    report = validate_plan(t, steps, metrics={Metric.total_cost(), Metric.plan_length()})
    assert report.valid
    assert report.failure is None
    assert report.metric_values[Metric.total_cost()] == Fraction(15)  # 10 + 5
    assert report.metric_values[Metric.plan_length()] == 2
    assert len(report.trace) == 3


def test_empty_plan_valid_when_goal_in_init(rover_task):
    t = replace(rover_task, goal=goal_of(rover_task, "(at r0 w0)"))
    report = validate_plan(t, (), metrics={Metric.total_cost()})
    assert report.valid
    assert report.metric_values[Metric.total_cost()] == 0


def test_failure_at_step_index_with_missing_connected(rover_task_unpruned):
    t = rover_task_unpruned
    steps = (
        t.find_action("(sample_rock r0 r0store w0)"),
        t.find_action("(sample_soil r1 r1store w2)"),
        t.find_action("(drop r1 r1store)"),
        t.find_action("(navigate r0 w0 w2)"),
    )
    report = validate_plan(t, steps)
    assert not report.valid
    assert report.failure.kind == "precondition"
    assert report.failure.step == 3
    assert [str(a) for a in report.failure.missing] == ["(connected w0 w2)"]
    assert report.failure.violated == ()
    assert not report.metric_values  # metrics only for valid plans


def test_goal_miss_reported(rover_task):
    report = validate_plan(rover_task, ())
    assert not report.valid
    assert report.failure.kind == "goal"
    assert len(report.failure.missing) == 3


def test_metric_values_json_stable(rover_task):
    t = replace(rover_task, goal=goal_of(rover_task, "(at r0 w0)"))
    report = validate_plan(t, (), metrics={Metric.total_cost(), Metric.plan_length()})
    data = report.to_json()
    assert data["valid"] is True
    assert data["failure"] is None
    assert data["metrics"] == {"total_cost": "0", "plan_length": "0"}


# ---------------------------------------------------------------------------
# evaluate_metric


def test_plan_length_metric(rover_task):
    t = replace(rover_task, goal=goal_of(rover_task, "(rock_analysed w0)"))
    steps = (t.find_action("(sample_rock r0 r0store w0)"),)
    assert evaluate_metric(steps, Metric.plan_length(), t) == 1
    # a three-step plan scores exactly 3
    t3 = replace(rover_task, goal=goal_of(rover_task, "(at r0 w1)"))
    out, back = t3.find_action("(navigate r0 w0 w1)"), t3.find_action("(navigate r0 w1 w0)")
    assert evaluate_metric((out, back, out), Metric.plan_length(), t3) == 3


def test_weighted_cost_zeroes_out_navigation(rover_task):
    result = search_plan(rover_task, rover_task.init, rover_task.goal, SearchConfig.oracle())
    plan = result.plan
    weighted = Metric.weighted({"navigate": 0})
    value = evaluate_metric(plan, weighted, rover_task)
    # the optimal plan has exactly one navigate (cost 5): 70 - 5
    assert value == Fraction(65)
    assert evaluate_metric(plan, Metric.total_cost(), rover_task) == Fraction(70)


def test_metric_ordering_original_vs_alternative(rover_task):
    original = search_plan(rover_task, rover_task.init, rover_task.goal, SearchConfig.oracle()).plan
    forbidden = rover_task.find_action("(sample_rock r0 r0store w0)")
    smaller = rover_task.without_action(forbidden)
    alternative = search_plan(smaller, smaller.init, smaller.goal, SearchConfig.oracle()).plan
    # the alternative must be rescored on the task it belongs to
    a = evaluate_metric(original, Metric.total_cost(), rover_task)
    b = evaluate_metric(alternative, Metric.total_cost(), smaller)
    assert a < b


def test_evaluate_metric_rejects_invalid_plan(rover_task):
    steps = (rover_task.find_action("(drop r0 r0store)"),)  # store starts empty
    with pytest.raises(InvalidPlan):
        evaluate_metric(steps, Metric.total_cost(), rover_task)


def test_metric_parse_round_trip():
    for metric in (Metric.total_cost(), Metric.plan_length(), Metric.weighted({"navigate": 0, "drop": Fraction(1, 2)})):
        assert Metric.parse(str(metric)) == metric


# ---------------------------------------------------------------------------
# explain_inapplicable


def test_applicable_action_has_empty_diagnosis(rover_task):
    aid = rover_task.find_action("(sample_rock r0 r0store w0)")
    assert explain_inapplicable(rover_task, rover_task.init, aid) == ([], [])


def test_missing_connected_diagnosis(rover_task_unpruned):
    t = rover_task_unpruned
    aid = t.find_action("(navigate r0 w0 w2)")
    missing, violated = explain_inapplicable(t, t.init, aid)
    assert [str(a) for a in missing] == ["(connected w0 w2)"]
    assert violated == []


def test_negative_precondition_diagnosis(rover_task):
    t = rover_task
    state = apply_action(t, t.init, t.find_action("(navigate r1 w2 w0)"))
    cal = t.find_action("(calibrate r1 cam1 obj0 w0)")
    state = apply_action(t, state, cal)
    missing, violated = explain_inapplicable(t, state, cal)
    assert missing == []
    assert [str(a) for a in violated] == ["(calibrated cam1)"]


# ---------------------------------------------------------------------------
# properties


def test_search_plans_always_validate():
    rng = random.Random(51)
    for _ in range(50):
        task = random_task(rng)
        result = search_plan(task, task.init, task.goal, SearchConfig.oracle())
        if isinstance(result, PlanFound):
            report = validate_plan(task, result.plan, metrics={Metric.total_cost()})
            assert report.valid
            assert report.metric_values[Metric.total_cost()] == result.plan.total_cost


def test_validator_agrees_with_naive_simulator_on_random_plans():
    rng = random.Random(52)
    for _ in range(60):
        task = random_task(rng)
        steps = tuple(rng.choice(task.action_order) for _ in range(rng.randint(0, 6))) if task.action_order else ()
        report = validate_plan(task, steps)
        ok, fail_index, final = oracle_simulate(task, steps)
        goal_ok = ok and task.goal.pos <= final and not (task.goal.neg & final)
        assert report.valid == goal_ok
        if not ok:
            assert report.failure.kind == "precondition"
            assert report.failure.step == fail_index


def test_zero_cost_applicable_action_keeps_total_cost():
    task = make_task(
        3,
        [
            {"pre": [0], "add": [1], "del": [], "cost": 2},
            {"pre": [1], "add": [2], "del": [], "cost": 0, "name": "freebie"},
        ],
        init=[0],
        goal_pos=[1],
    )
    base = (0,)
    extended = (0, 1)
    assert evaluate_metric(base, Metric.total_cost(), task) == evaluate_metric(extended, Metric.total_cost(), task) == 2
    assert evaluate_metric(extended, Metric.plan_length(), task) == evaluate_metric(base, Metric.plan_length(), task) + 1
