"""Core task model: predicates, actions, states, and transition semantics.

States are closed-world sets of ground positive literals.  A handful of
predicate names are geometric: their truth is computed from the scene
rather than looked up in the literal set.  Probabilities are exact
rationals and each action's outcome probabilities must sum to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import geometry
from .birrt import default_step
from .errors import PreconditionViolated, SemanticError, UnboundVariable
from .geometry import Trajectory, WorldModel
from .sexpr import format_number

OBJECT = "object"
CONTINUOUS = "continuous"

SYMBOLIC = "symbolic"
HYBRID = "hybrid"
MOTION = "motion-planning"

DEFAULT_REACH = 0.6


@dataclass(frozen=True)
class ArgType:
    """Type of a predicate or action parameter."""

    kind: str
    dim: int | None = None
    trajectory: bool = False

    def __post_init__(self):
        if self.kind not in (OBJECT, CONTINUOUS):
            raise SemanticError(f"unknown argument kind {self.kind}")
        if self.kind == OBJECT and (self.dim is not None or self.trajectory):
            raise SemanticError("object arguments carry no dimension")
        if self.kind == CONTINUOUS and not self.trajectory:
            if self.dim is None or self.dim < 1:
                raise SemanticError("continuous arguments need dimension >= 1")

    @classmethod
    def object(cls) -> "ArgType":
        return cls(OBJECT)

    @classmethod
    def vector(cls, dim: int) -> "ArgType":
        return cls(CONTINUOUS, dim=dim)

    @classmethod
    def traj(cls) -> "ArgType":
        return cls(CONTINUOUS, trajectory=True)

    @property
    def is_object(self) -> bool:
        return self.kind == OBJECT

    def admits(self, value) -> bool:
        if self.kind == OBJECT:
            return isinstance(value, str)
        if self.trajectory:
            return isinstance(value, Trajectory)
        return (
            isinstance(value, tuple)
            and len(value) == self.dim
            and all(isinstance(v, float) for v in value)
        )


def format_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, tuple):
        return "[" + " ".join(format_number(x) for x in v) + "]"
    if isinstance(v, Trajectory):
        return f"<traj {format_value(v.start)}..{format_value(v.end)} n={len(v.waypoints)}>"
    raise SemanticError(f"unsupported literal argument {v!r}")


def value_to_json(v):
    """Lossless JSON encoding of a binding value (object name, point, or
    trajectory), inverse of ``value_from_json``."""
    if isinstance(v, str):
        return v
    if isinstance(v, tuple):
        return [float(x) for x in v]
    if isinstance(v, Trajectory):
        return {"waypoints": [[float(x) for x in w] for w in v.waypoints]}
    raise SemanticError(f"unsupported binding value {v!r}")


def value_from_json(data):
    if isinstance(data, str):
        return data
    if isinstance(data, list):
        return tuple(float(x) for x in data)
    if isinstance(data, dict) and "waypoints" in data:
        return Trajectory(tuple(tuple(float(x) for x in w)
                                for w in data["waypoints"]))
    raise SemanticError(f"unsupported binding value encoding {data!r}")


def is_variable(term) -> bool:
    return isinstance(term, str) and term.startswith("?")


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    params: tuple[ArgType, ...]

    @property
    def kind(self) -> str:
        return SYMBOLIC if all(p.is_object for p in self.params) else HYBRID


@dataclass(frozen=True)
class Literal:
    """A predicate applied to arguments, with polarity.

    Arguments are object names, ``?variables``, float tuples, or
    trajectories.
    """

    pred: str
    args: tuple
    positive: bool = True

    def __str__(self) -> str:
        inner = " ".join(format_value(a) for a in self.args)
        body = f"({self.pred} {inner})" if self.args else f"({self.pred})"
        return body if self.positive else f"(not {body})"

    def sort_key(self):
        return (self.pred, tuple(format_value(a) for a in self.args), not self.positive)

    @property
    def negated(self) -> "Literal":
        return Literal(self.pred, self.args, not self.positive)

    @property
    def atom(self) -> "Literal":
        return self if self.positive else Literal(self.pred, self.args, True)

    def is_ground(self) -> bool:
        return not any(is_variable(a) for a in self.args)

    def substitute(self, binding: dict) -> "Literal":
        args = []
        for a in self.args:
            if is_variable(a):
                if a not in binding:
                    raise UnboundVariable(a)
                args.append(binding[a])
            else:
                args.append(a)
        return Literal(self.pred, tuple(args), self.positive)


def sorted_literals(literals) -> tuple[Literal, ...]:
    return tuple(sorted(literals, key=Literal.sort_key))


@dataclass(frozen=True)
class ActionSchema:
    """Parameterized action with stochastic outcomes.

    ``params`` pairs each name with its type, objects first by convention.
    ``outcomes`` maps exact rational probabilities to literal-set effects;
    deterministic actions have a single outcome of probability one.
    """

    name: str
    params: tuple[tuple[str, ArgType], ...]
    precondition: tuple[Literal, ...]
    outcomes: tuple[tuple[Fraction, tuple[Literal, ...]], ...]
    cost: float = 1.0

    def __post_init__(self):
        names = [n for n, _ in self.params]
        if len(set(names)) != len(names):
            raise SemanticError(f"duplicate parameter in action {self.name}")
        if not self.outcomes:
            raise SemanticError(f"action {self.name} has no outcomes")
        total = Fraction(0)
        for prob, _ in self.outcomes:
            if not 0 < prob <= 1:
                raise SemanticError(
                    f"action {self.name}: outcome probability {prob} outside (0, 1]")
            total += prob
        if total != 1:
            raise SemanticError(
                f"action {self.name}: outcome probabilities sum to {total}, not 1")
        if self.cost < 0:
            raise SemanticError(f"action {self.name}: negative cost")

    @cached_property
    def param_types(self) -> dict[str, ArgType]:
        return dict(self.params)

    @property
    def object_params(self) -> tuple[str, ...]:
        return tuple(n for n, t in self.params if t.is_object)

    @property
    def continuous_params(self) -> tuple[str, ...]:
        return tuple(n for n, t in self.params if not t.is_object)

    @property
    def kind(self) -> str:
        """Symbolic schemas mention no continuous values anywhere; a single
        vector constant or continuous parameter makes the schema hybrid, and
        a trajectory parameter makes it motion-planning."""
        if any(t.trajectory for _, t in self.params):
            return MOTION
        if any(not t.is_object for _, t in self.params):
            return HYBRID
        for lit in self.precondition:
            if any(isinstance(a, (tuple, Trajectory)) for a in lit.args):
                return HYBRID
        for _, effects in self.outcomes:
            for lit in effects:
                if any(isinstance(a, (tuple, Trajectory)) for a in lit.args):
                    return HYBRID
        return SYMBOLIC


@dataclass(frozen=True)
class Universe:
    """Objects and predicate vocabulary shared by a model's states."""

    objects: tuple[str, ...]
    predicates: dict = field(hash=False)

    def predicate(self, name: str) -> PredicateSchema:
        try:
            return self.predicates[name]
        except KeyError:
            raise SemanticError(f"unknown predicate {name}")


@dataclass(frozen=True)
class ConcreteState:
    """Closed-world state: the set of true ground atoms plus the world
    description the geometric predicates evaluate against."""

    literals: frozenset
    world: WorldModel | None = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        for lit in self.literals:
            if not lit.positive:
                raise SemanticError(f"state literal must be positive: {lit}")
            if not lit.is_ground():
                raise SemanticError(f"state literal must be ground: {lit}")

    def key(self) -> tuple[str, ...]:
        return tuple(sorted(str(l) for l in self.literals))

    def placements(self, placement_pred: str = "at") -> dict[str, tuple]:
        out = {}
        for lit in self.literals:
            if lit.pred == placement_pred and len(lit.args) == 2:
                name, pose = lit.args
                if isinstance(name, str) and isinstance(pose, tuple):
                    out[name] = pose
        return out

    @cached_property
    def scene(self) -> geometry.GeometricScene:
        if self.world is None:
            raise SemanticError("state has no world model; geometric predicates unavailable")
        return self.world.scene(self.placements())

    def robot_config(self, robot_pred: str = "robot-at"):
        for lit in self.literals:
            if lit.pred == robot_pred and len(lit.args) == 1:
                return lit.args[0]
        return None

    def with_literals(self, literals) -> "ConcreteState":
        return ConcreteState(frozenset(literals), self.world)


# --- geometric predicate evaluation ------------------------------------

def _eval_is_valid_mp(state, args):
    traj, c1, c2 = args
    ok = (
        isinstance(traj, Trajectory)
        and math.dist(traj.start, c1) <= 1e-9
        and math.dist(traj.end, c2) <= 1e-9
    )
    return ok, ()


def _eval_is_collision_free(state, args):
    (traj,) = args
    scene = state.scene
    resolution = default_step(scene) / 2.0
    hits = geometry.swept_collisions(scene, traj, resolution)
    return not hits, hits


def _eval_is_grasp_config(state, args):
    obj, config = args
    pose = state.placements().get(obj)
    if pose is None:
        return False, ()
    reach = state.world.params.get("reach", DEFAULT_REACH)
    return math.dist(config[:2], pose[:2]) <= reach, ()


def _eval_is_placement_config(state, args):
    obj, config, pose = args
    world = state.world
    reach = world.params.get("reach", DEFAULT_REACH)
    if math.dist(config[:2], pose[:2]) > reach:
        return False, ()
    poly = world.movables.get(obj)
    if poly is None:
        return False, ()
    hits = geometry.placement_contacts(state.scene, poly, pose, ignore={obj})
    return not hits, hits


def _eval_in_region(state, args):
    pose, region = args
    poly = state.world.regions.get(region)
    if poly is None:
        return False, ()
    return geometry.point_in_polygon(pose[:2], poly), ()


def _eval_within_range(state, args):
    (traj,) = args
    limit = state.world.params.get("move_range", float("inf"))
    return traj.length() <= limit, ()


GEOMETRIC_PREDICATES = {
    "is-valid-mp": _eval_is_valid_mp,
    "is-collision-free": _eval_is_collision_free,
    "is-grasp-config": _eval_is_grasp_config,
    "is-placement-config": _eval_is_placement_config,
    "in-region": _eval_in_region,
    "within-range": _eval_within_range,
}


def holds_with_witnesses(state: ConcreteState, literal: Literal):
    """Truth of a ground literal plus, for geometric failures, the entity
    names responsible."""
    if not literal.is_ground():
        raise UnboundVariable(next(a for a in literal.args if is_variable(a)))
    evaluator = GEOMETRIC_PREDICATES.get(literal.pred)
    if evaluator is not None:
        truth, witnesses = evaluator(state, literal.args)
        if literal.positive:
            return truth, witnesses
        return not truth, ()
    truth = literal.atom in state.literals
    return (truth if literal.positive else not truth), ()


def holds(state: ConcreteState, literal: Literal) -> bool:
    return holds_with_witnesses(state, literal)[0]


# --- model --------------------------------------------------------------

@dataclass(frozen=True)
class ConcreteModel:
    """Goal-oriented stochastic model: finite horizon, undiscounted, unit
    goal semantics (goal states absorbing and cost-free)."""

    name: str
    universe: Universe
    actions: dict = field(hash=False)
    initial: ConcreteState = None
    goal: tuple[Literal, ...] = ()
    horizon: int = 50
    world: WorldModel | None = field(default=None, hash=False, compare=False)
    generators: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        if self.horizon < 1:
            raise SemanticError("horizon must be a positive integer")
        for lit in self.goal:
            if not lit.is_ground():
                raise SemanticError(f"goal literal must be ground: {lit}")

    def action(self, name: str) -> ActionSchema:
        try:
            return self.actions[name]
        except KeyError:
            raise SemanticError(f"unknown action {name}")

    def goal_holds(self, state: ConcreteState) -> bool:
        return all(holds(state, lit) for lit in self.goal)


def check_binding(action: ActionSchema, binding: dict) -> None:
    for name, argtype in action.params:
        if name not in binding:
            raise UnboundVariable(name)
        if not argtype.admits(binding[name]):
            raise SemanticError(
                f"action {action.name}: value {binding[name]!r} does not fit parameter {name}")


def apply_outcome(state: ConcreteState, action: ActionSchema, binding: dict,
                  outcome_index: int) -> ConcreteState:
    """Apply one outcome of a ground action.  Preconditions are checked in
    canonical order and the first unsatisfied one is reported; deletes
    happen before adds."""
    check_binding(action, binding)
    for lit in action.precondition:
        ground = lit.substitute(binding)
        if not holds(state, ground):
            raise PreconditionViolated(ground)
    if not 0 <= outcome_index < len(action.outcomes):
        raise SemanticError(
            f"action {action.name} has no outcome {outcome_index}")
    _, effects = action.outcomes[outcome_index]
    literals = set(state.literals)
    grounded = [eff.substitute(binding) for eff in effects]
    for eff in grounded:
        if not eff.positive:
            literals.discard(eff.atom)
    for eff in grounded:
        if eff.positive:
            literals.add(eff)
    return state.with_literals(literals)
