"""Anytime planner for stochastic task and motion problems.

The pipeline: parse a domain/problem/world triple into a concrete model,
abstract its continuous arguments into symbolic references, solve the
abstract model for a contingent policy, then interleave policy refinement
(finding concrete values) with abstraction refinement (learning failure
facts) until enough probability mass is covered by executable branches.
"""

from .abstraction import (
    AbstractModel,
    GeneratorSpec,
    GroundAction,
    RefTok,
    ValTok,
    alpha_state,
    concretize_action,
    estimate_cost,
    satisfies,
)
from .benchmarks import BENCHMARKS, Benchmark
from .errors import StampError
from .geometry import Trajectory, WorldModel
from .model import (
    ActionSchema,
    ConcreteModel,
    ConcreteState,
    Literal,
    apply_outcome,
    holds,
    holds_with_witnesses,
)
from .parser import (
    Domain,
    load_model,
    parse_domain,
    parse_problem,
    print_domain,
    print_problem,
)
from .planner import (
    HPlan,
    HPlanResult,
    RealClock,
    Snapshot,
    VirtualClock,
    hplan,
    write_ledger,
)
from .solver import (
    PolicyTree,
    Solution,
    lao_star,
    solve_with_dynamic_horizon,
    unroll_policy,
    value_iteration,
)
from .verify import RolloutReport, rollout_verify

__version__ = "0.1.0"

__all__ = [
    "AbstractModel",
    "ActionSchema",
    "BENCHMARKS",
    "Benchmark",
    "ConcreteModel",
    "ConcreteState",
    "Domain",
    "GeneratorSpec",
    "GroundAction",
    "HPlan",
    "HPlanResult",
    "Literal",
    "PolicyTree",
    "RealClock",
    "RefTok",
    "RolloutReport",
    "Snapshot",
    "Solution",
    "StampError",
    "Trajectory",
    "ValTok",
    "VirtualClock",
    "WorldModel",
    "alpha_state",
    "apply_outcome",
    "concretize_action",
    "estimate_cost",
    "holds",
    "holds_with_witnesses",
    "hplan",
    "lao_star",
    "load_model",
    "parse_domain",
    "parse_problem",
    "print_domain",
    "print_problem",
    "rollout_verify",
    "satisfies",
    "solve_with_dynamic_horizon",
    "unroll_policy",
    "value_iteration",
    "write_ledger",
    "__version__",
]
