"""Plan explanation toolkit over a classical PDDL subset.

Pipeline: parse -> ground -> plan -> explain. Explanations cover why an
action is in a plan (causal links and alternative achievers), why a user's
alternative was not chosen (forbid/require compilations and decision
injection with outcome classification), how plans score under other metrics,
and, during execution, why replanning is or is not needed (dependency filters
and revalidation).
"""

from .causal import GOAL, CausalLink, WhyAnswer, extract_causal_links, why_action
from .contrastive import (
    ContrastiveQuery,
    ContrastiveSession,
    DivergenceOutcome,
    FailureOutcome,
    InjectionOutcome,
    ReconvergenceOutcome,
    UndoOutcome,
    classify_outcome,
    compile_forbid_action,
    compile_require_participation,
    inject_and_replan,
    whatif_forbid,
    whatif_require,
)
from .errors import WhyplanError
from .monitor import Filter, KnowledgeBaseUpdate, MonitorSession, NoReplanReport, ViolationReport, build_filter, read_updates
from .pddl.ground import Goal, GroundAction, GroundTask, ground_task, static_predicates
from .pddl.model import ActionSchema, Atom, DomainModel, Predicate, ProblemModel, TypeHierarchy
from .pddl.parser import parse_domain, parse_problem
from .pddl.printer import domain_to_pddl, format_fraction, problem_to_pddl
from .planio import plan_to_json, read_plan, write_plan
from .report import ExplanationReport
from .search import (
    Heuristic,
    Plan,
    PlanFound,
    ResourceLimit,
    SearchConfig,
    Strategy,
    Unsolvable,
    apply_action,
    make_plan,
    search_plan,
    trace_of,
)
from .validate import Metric, ValidationReport, evaluate_metric, explain_inapplicable, validate_plan

__version__ = "0.1.0"
