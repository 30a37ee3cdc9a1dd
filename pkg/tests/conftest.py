from __future__ import annotations

from pathlib import Path

import pytest

from whyplan import ground_task, parse_domain, parse_problem

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_models(name: str, problem: str = "problem.pddl"):
    domain = parse_domain((FIXTURES / name / "domain.pddl").read_text())
    prob = parse_problem((FIXTURES / name / problem).read_text(), domain)
    return domain, prob


@pytest.fixture(scope="session")
def rover_models():
    return load_models("mini-rover")


@pytest.fixture(scope="session")
def rover_task(rover_models):
    return ground_task(*rover_models)


@pytest.fixture(scope="session")
def rover_task_unpruned(rover_models):
    return ground_task(*rover_models, prune_static=False)


@pytest.fixture(scope="session")
def auv_models():
    return load_models("auv-toy")


@pytest.fixture(scope="session")
def auv_task(auv_models):
    return ground_task(*auv_models)


@pytest.fixture(scope="session")
def auv_plan(auv_task):
    from whyplan import read_plan

    return read_plan(auv_task, (FIXTURES / "auv-toy" / "plan.txt").read_text())


@pytest.fixture(scope="session")
def track_tasks():
    tasks = {}
    for name in ("undo", "reconverge", "diverge", "deadend"):
        domain, problem = load_models("track", f"{name}.pddl")
        tasks[name] = ground_task(domain, problem)
    return tasks
