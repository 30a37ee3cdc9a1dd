"""Pretty-printers that emit parseable PDDL for in-memory models.

Round-trip guarantee: re-parsing the printed text of a parsed model yields a
structurally identical model. Compiled schemas (bound constants, exclusion
lists, participation markers) are in-memory artifacts and are not printable.
"""

from __future__ import annotations

from fractions import Fraction

from .model import ActionSchema, DomainModel, ProblemModel


def format_fraction(x: Fraction) -> str:
    """Exact text for a rational: integer, finite decimal, or num/den."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        shift = max(twos, fives)
        scaled = x.numerator * 10**shift // x.denominator
        text = str(abs(scaled)).rjust(shift + 1, "0")
        sign = "-" if scaled < 0 else ""
        return f"{sign}{text[:-shift]}.{text[-shift:]}"
    return f"{x.numerator}/{x.denominator}"


def _typed_names(pairs) -> str:
    return " ".join(f"{n} - {t}" for n, t in pairs)


def _condition(pos, neg) -> str:
    parts = [str(a) for a in pos] + [f"(not {a})" for a in neg]
    if len(parts) == 1:
        return parts[0]
    return "(and " + " ".join(parts) + ")"


def _schema_to_pddl(schema: ActionSchema, uses_costs: bool) -> str:
    if schema.excluded or schema.marker or schema.display_name != schema.name:
        raise ValueError(f"schema {schema.name} is a compiled variant and has no PDDL form")
    lines = [f"  (:action {schema.name}"]
    lines.append(f"   :parameters ({_typed_names(schema.parameters)})")
    if schema.pre_pos or schema.pre_neg:
        lines.append(f"   :precondition {_condition(schema.pre_pos, schema.pre_neg)}")
    effects = [str(a) for a in schema.add] + [f"(not {a})" for a in schema.delete]
    if uses_costs:
        effects.append(f"(increase (total-cost) {format_fraction(schema.cost)})")
    lines.append("   :effect (and " + " ".join(effects) + "))")
    return "\n".join(lines)


def domain_to_pddl(domain: DomainModel) -> str:
    lines = [f"(define (domain {domain.name})"]
    if domain.requirements:
        lines.append("  (:requirements " + " ".join(domain.requirements) + ")")
    if domain.types.parents:
        decls = " ".join(f"{t} - {p}" for t, p in sorted(domain.types.parents.items()))
        lines.append(f"  (:types {decls})")
    if domain.constants:
        lines.append(f"  (:constants {_typed_names(domain.constants)})")
    if domain.predicates:
        decls = []
        for p in domain.predicates:
            if p.params:
                decls.append(f"({p.name} {_typed_names(p.params)})")
            else:
                decls.append(f"({p.name})")
        lines.append("  (:predicates " + " ".join(decls) + ")")
    if domain.uses_costs:
        lines.append("  (:functions (total-cost))")
    for schema in domain.schemas:
        lines.append(_schema_to_pddl(schema, domain.uses_costs))
    lines.append(")")
    return "\n".join(lines) + "\n"


def problem_to_pddl(problem: ProblemModel) -> str:
    lines = [f"(define (problem {problem.name})", f"  (:domain {problem.domain_name})"]
    if problem.objects:
        lines.append(f"  (:objects {_typed_names(problem.objects)})")
    init = " ".join(str(a) for a in sorted(problem.init))
    lines.append(f"  (:init {init})")
    goal = _condition(sorted(problem.goal_pos), sorted(problem.goal_neg))
    lines.append(f"  (:goal {goal})")
    if problem.metric:
        lines.append("  (:metric minimize (total-cost))")
    lines.append(")")
    return "\n".join(lines) + "\n"
