from .ground import Goal, GroundAction, GroundTask, ground_task, static_predicates
from .model import ActionSchema, Atom, DomainModel, Predicate, ProblemModel, TypeHierarchy
from .parser import parse_domain, parse_problem
from .printer import domain_to_pddl, format_fraction, problem_to_pddl
