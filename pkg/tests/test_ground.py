from __future__ import annotations

import random

import pytest

from whyplan import ground_task, parse_domain, parse_problem, static_predicates
from whyplan.errors import GroundingLimitExceeded, UnknownAction
from whyplan.pddl.model import Atom

from .conftest import load_models
from .oracles import oracle_enumerate, oracle_reachable, oracle_static_predicate_names
from .random_tasks import random_model


def test_static_predicates_mini_rover(rover_models):
    domain, _ = rover_models
    assert static_predicates(domain) == {
        "connected",
        "on_board",
        "calibration_target",
        "visible_from",
    }


def test_connected_is_static(rover_models):
    domain, _ = rover_models
    assert "connected" in static_predicates(domain)


def test_static_predicates_empty_when_all_predicates_have_effects():
    domain = parse_domain(
        """
        (define (domain d) (:requirements :strips)
          (:predicates (p) (q))
          (:action a :parameters () :precondition (p) :effect (and (q) (not (p)))))
        """
    )
    assert static_predicates(domain) == frozenset()


def test_static_predicates_idempotent(rover_models):
    domain, _ = rover_models
    assert static_predicates(domain) == static_predicates(domain)


def test_ground_count_matches_enumeration_oracle(rover_models):
    domain, problem = rover_models
    task = ground_task(domain, problem)
    expected = oracle_enumerate(domain, problem, prune=True)
    got = {(task.actions[a].schema, task.actions[a].args) for a in task.action_order}
    assert got == expected


def test_unpruned_count_matches_enumeration_oracle(rover_models):
    domain, problem = rover_models
    task = ground_task(domain, problem, prune_static=False)
    assert len(task.actions) == len(oracle_enumerate(domain, problem, prune=False))


def test_pruning_drops_unconnected_navigation(rover_task):
    # connectivity is only w0<->w1 and w2->w0, so no (navigate * w0 w2) survives
    labels = {rover_task.actions[a].label for a in rover_task.action_order}
    assert "(navigate r0 w0 w2)" not in labels
    assert "(navigate r1 w0 w2)" not in labels
    assert "(navigate r0 w0 w1)" in labels


def test_zero_schema_domain_grounds_to_zero_actions():
    domain = parse_domain("(define (domain d) (:predicates (p)))")
    problem = parse_problem(
        "(define (problem q) (:domain d) (:init (p)) (:goal (p)))", domain
    )
    task = ground_task(domain, problem)
    assert task.actions == {}
    assert len(task.atoms) == 1


def test_grounding_cap():
    domain, problem = load_models("mini-rover")
    with pytest.raises(GroundingLimitExceeded):
        ground_task(domain, problem, max_instantiations=10)


def test_ids_are_dense_and_lexicographic(rover_task):
    assert list(rover_task.actions) == list(range(len(rover_task.actions)))
    keys = [(rover_task.actions[a].schema, rover_task.actions[a].args) for a in rover_task.action_order]
    assert keys == sorted(keys)
    assert list(rover_task.atoms) == sorted(rover_task.atoms)


def test_grounding_soundness_by_resubstitution(rover_models, rover_task):
    domain, _ = rover_models
    for act in rover_task.actions.values():
        schema = domain.schema(act.schema_key)
        binding = dict(act.binding)
        for group, templates in (
            (act.pre_pos, schema.pre_pos),
            (act.pre_neg, schema.pre_neg),
            (act.add, schema.add),
        ):
            expected = {t.substitute(binding) for t in templates}
            got = {rover_task.atoms[p] for p in group}
            assert expected == got
        # deletes are normalised so add and delete never overlap
        assert not (act.add & act.delete)


def test_dump_format_deterministic(rover_task):
    dump = rover_task.dump()
    lines = dump.strip().splitlines()
    assert lines[0].startswith("P 0 (")
    assert any(l.startswith("A 0 ") and "cost=" in l for l in lines)
    assert dump == rover_task.dump()


def test_without_action_retires_id(rover_task):
    aid = rover_task.find_action("(sample_rock r0 r0store w0)")
    smaller = rover_task.without_action(aid)
    assert aid not in smaller.actions
    assert len(smaller.actions) == len(rover_task.actions) - 1
    assert smaller.action_order == tuple(a for a in rover_task.action_order if a != aid)
    with pytest.raises(UnknownAction):
        smaller.find_action("(sample_rock r0 r0store w0)")


def test_init_ids_valid(rover_task):
    assert all(0 <= p < len(rover_task.atoms) for p in rover_task.init)
    assert rover_task.atom_id(Atom.parse("(at r0 w0)")) in rover_task.init


def test_static_predicates_agree_with_ground_oracle(rover_task):
    # ground-level recomputation of static-ness matches the schema-level one
    ground_level = oracle_static_predicate_names(rover_task)
    for pred in rover_task.static_predicates:
        assert pred in ground_level


def test_pruning_preserves_reachability_on_random_models():
    rng = random.Random(11)
    checked = 0
    for _ in range(40):
        domain, problem = random_model(rng)
        try:
            pruned = ground_task(domain, problem)
            full = ground_task(domain, problem, prune_static=False)
        except GroundingLimitExceeded:
            continue
        reach_pruned = {frozenset(pruned.atoms[p] for p in s) for s in oracle_reachable(pruned)}
        reach_full = {frozenset(full.atoms[p] for p in s) for s in oracle_reachable(full)}
        assert reach_pruned == reach_full
        checked += 1
    assert checked >= 30


def test_random_model_counts_match_enumeration_oracle():
    rng = random.Random(13)
    for _ in range(30):
        domain, problem = random_model(rng)
        task = ground_task(domain, problem)
        got = {(task.actions[a].schema, task.actions[a].args) for a in task.action_order}
        assert got == oracle_enumerate(domain, problem, prune=True)
