"""Entity abstraction over concrete task models.

Continuous action arguments are replaced by symbolic references, one per
(action, parameter, object-binding) triple.  Each reference carries the
domain descriptor of the generator that will later concretize it, and an
abstract atom is true when some concrete value in the referenced set makes
it true.  Geometric preconditions cannot be verified at this level: they
are dropped from abstract preconditions and gated instead by learned
failure facts, while effects that depend on them are marked unknown and
treated optimistically as absent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import birrt, geometry
from .errors import (
    GeneratorExhausted,
    MissingDescriptor,
    NoPlanFound,
    OutOfBounds,
    SemanticError,
    StartOrGoalInCollision,
    UnboundVariable,
)
from .model import (
    GEOMETRIC_PREDICATES,
    ActionSchema,
    ConcreteModel,
    ConcreteState,
    Literal,
    format_value,
    holds_with_witnesses,
    is_variable,
)
from .sexpr import format_number

OBSTRUCTS = "obstructs"
UNATTAINABLE = "unattainable"

DEFAULT_CONCRETIZE_BUDGET = 200
DEFAULT_MOTION_BUDGET = 1000
DEFAULT_TRAJ_CANDIDATES = 5


@dataclass(frozen=True)
class GeneratorSpec:
    """Declarative description of the candidate set for one continuous
    parameter.  ``measure`` feeds the refinement cost estimate and is
    always at least one."""

    kind: str
    values: tuple = ()
    anchor: str | None = None
    pred: str | None = None
    terms: tuple = ()
    poly: tuple = ()
    cap: int = 0
    declared_measure: float | None = None

    @classmethod
    def finite(cls, values) -> "GeneratorSpec":
        return cls("finite", values=tuple(values))

    @classmethod
    def offsets(cls, anchor: str, values) -> "GeneratorSpec":
        return cls("offsets", anchor=anchor, values=tuple(values))

    @classmethod
    def atoms(cls, pred: str, terms) -> "GeneratorSpec":
        return cls("atoms", pred=pred, terms=tuple(terms))

    @classmethod
    def region(cls, poly, cap: int, measure: float | None = None) -> "GeneratorSpec":
        return cls("region", poly=tuple(poly), cap=cap, declared_measure=measure)

    @classmethod
    def motion(cls, cap: int = DEFAULT_TRAJ_CANDIDATES) -> "GeneratorSpec":
        return cls("motion", cap=cap)

    @property
    def measure(self) -> float:
        if self.kind in ("finite", "offsets"):
            return float(max(len(self.values), 1))
        if self.kind == "atoms":
            return 1.0
        if self.kind == "region":
            if self.declared_measure is not None:
                return max(self.declared_measure, 1.0)
            return max(geometry.polygon_area(self.poly), 1.0)
        if self.kind == "motion":
            return float(max(self.cap, 1))
        raise SemanticError(f"unknown generator kind {self.kind}")

    def finite_extent(self) -> bool:
        return self.kind in ("finite", "offsets", "atoms")

    def admits_vector(self, vec) -> bool:
        """Extent membership where decidable; unknown extents admit."""
        if self.kind == "finite":
            return vec in self.values
        if self.kind == "region":
            return geometry.point_in_polygon(vec[:2], self.poly)
        return True

    def candidates(self, state: ConcreteState, binding: dict, rng, *,
                   shuffle: bool = False):
        """Candidate values in declaration order (seeded shuffle when
        exploring).  Region extents yield up to ``cap`` fresh samples."""
        if self.kind == "finite":
            values = list(self.values)
        elif self.kind == "offsets":
            if self.anchor not in binding:
                raise UnboundVariable(self.anchor)
            anchor = binding[self.anchor]
            values = [
                tuple(a + o for a, o in zip(anchor, off)) for off in self.values
            ]
        elif self.kind == "atoms":
            bound_terms = []
            for t in self.terms:
                if isinstance(t, str) and is_variable(t):
                    if t not in binding:
                        raise UnboundVariable(t)
                    bound_terms.append(binding[t])
                else:
                    bound_terms.append(t)
            values = sorted(
                (
                    lit.args[len(bound_terms)]
                    for lit in state.literals
                    if lit.pred == self.pred
                    and len(lit.args) == len(bound_terms) + 1
                    and all(a == b for a, b in zip(lit.args, bound_terms))
                ),
                key=format_value,
            )
        elif self.kind == "region":
            return [
                geometry.sample_in_polygon(self.poly, rng) for _ in range(self.cap)
            ]
        else:
            raise SemanticError(f"generator kind {self.kind} has no direct candidates")
        if shuffle:
            rng.shuffle(values)
        return values


class RefTok(str):
    """Symbolic reference standing for the set of values a generator can
    produce for one continuous parameter of one ground action."""

    def __new__(cls, action: str, param: str, objargs: tuple, spec: GeneratorSpec):
        label = f"{param.lstrip('?')}@{action}({' '.join(objargs)})"
        obj = super().__new__(cls, label)
        obj.action = action
        obj.param = param
        obj.objargs = objargs
        obj.spec = spec
        return obj


class ValTok(str):
    """Abstract stand-in for one concrete continuous value."""

    def __new__(cls, vec: tuple):
        obj = super().__new__(cls, "<" + " ".join(format_number(v) for v in vec) + ">")
        obj.vec = vec
        return obj


def lift_value(v):
    return ValTok(v) if isinstance(v, tuple) else v


def is_token(v) -> bool:
    return isinstance(v, (RefTok, ValTok))


def is_object_name(v) -> bool:
    return isinstance(v, str) and not isinstance(v, (RefTok, ValTok)) \
        and not is_variable(v)


def alpha_state(state: ConcreteState) -> frozenset:
    """Abstract a concrete state: continuous arguments become value tokens."""
    return frozenset(
        Literal(lit.pred, tuple(lift_value(a) for a in lit.args))
        for lit in state.literals
    )


def _compatible(state_arg, cond_arg) -> bool:
    """Can ``state_arg`` witness ``cond_arg``?  Exact matches always do;
    reference arguments match decidable extent membership and are
    optimistic where the extent depends on the state."""
    if isinstance(cond_arg, RefTok):
        if isinstance(state_arg, ValTok):
            return cond_arg.spec.admits_vector(state_arg.vec)
        if isinstance(state_arg, RefTok):
            if str(state_arg) == str(cond_arg):
                return True
            return cond_arg.spec.kind in ("atoms", "offsets", "motion")
        return False
    if isinstance(cond_arg, ValTok):
        if isinstance(state_arg, ValTok):
            return state_arg.vec == cond_arg.vec
        if isinstance(state_arg, RefTok):
            return state_arg.spec.admits_vector(cond_arg.vec)
        return False
    return state_arg == cond_arg and not is_token(state_arg)


def satisfies(state: frozenset, lit: Literal) -> bool:
    matched = any(
        atom.pred == lit.pred
        and len(atom.args) == len(lit.args)
        and all(_compatible(a, c) for a, c in zip(atom.args, lit.args))
        for atom in state
    )
    return matched if lit.positive else not matched


@dataclass(frozen=True)
class AbstractAction:
    """Action schema after abstraction: geometric preconditions moved to
    guards, effects that depend on them split out as unknown."""

    name: str
    schema: ActionSchema
    precondition: tuple[Literal, ...]
    guards: tuple[Literal, ...]
    outcomes: tuple
    unknown_effects: tuple[Literal, ...]

    @property
    def cost(self) -> float:
        return self.schema.cost


def _lift_literal(lit: Literal) -> Literal:
    return Literal(lit.pred, tuple(lift_value(a) for a in lit.args), lit.positive)


def abstract_action(schema: ActionSchema) -> AbstractAction:
    kept, guards = [], []
    for lit in schema.precondition:
        (guards if lit.pred in GEOMETRIC_PREDICATES else kept).append(_lift_literal(lit))
    outcomes = tuple(
        (prob, tuple(_lift_literal(e) for e in effects))
        for prob, effects in schema.outcomes
    )

    def is_cont_arg(a) -> bool:
        if isinstance(a, ValTok):
            return True
        return (is_variable(a) and a in schema.param_types
                and not schema.param_types[a].is_object)

    # Giving an object a new placement may obstruct trajectories that are
    # not identified yet; record that as an unknown effect, never applied
    # and never assumed (the optimistic reading).
    unknown, seen = [], set()
    for _, effects in outcomes:
        for eff in effects:
            if not eff.positive or not any(is_cont_arg(a) for a in eff.args):
                continue
            for a in eff.args:
                if (is_object_name(a) or (is_variable(a) and a in schema.param_types
                                          and schema.param_types[a].is_object)):
                    if a not in seen:
                        seen.add(a)
                        unknown.append(Literal(OBSTRUCTS, ("*", a)))
    return AbstractAction(
        schema.name, schema, tuple(kept), tuple(guards), outcomes, tuple(unknown))


class GroundAction:
    """One object-binding of an abstract action, continuous parameters
    replaced by reference tokens."""

    __slots__ = (
        "abstract", "binding", "tokens", "precondition", "guards", "outcomes",
        "key", "block_keys", "token_strs", "full_binding",
        "_exact_pos", "_exact_neg", "_fuzzy_pre",
    )

    def __init__(self, abstract: AbstractAction, binding: dict,
                 descriptors: dict):
        self.abstract = abstract
        self.binding = dict(binding)
        schema = abstract.schema
        objargs = tuple(binding[p] for p in schema.object_params)
        self.tokens = {}
        for param in schema.continuous_params:
            spec = descriptors.get((schema.name, param))
            if spec is None:
                if schema.param_types[param].trajectory:
                    spec = GeneratorSpec.motion()
                else:
                    raise MissingDescriptor(schema.name, param)
            self.tokens[param] = RefTok(schema.name, param, objargs, spec)
        self.full_binding = {**self.binding, **self.tokens}
        self.precondition = tuple(
            l.substitute(self.full_binding) for l in abstract.precondition)
        self.guards = tuple(
            l.substitute(self.full_binding) for l in abstract.guards)
        self.outcomes = tuple(
            (prob, tuple(e.substitute(self.full_binding) for e in effects))
            for prob, effects in abstract.outcomes
        )
        self.key = (
            schema.name,
            tuple(sorted((p, v) for p, v in self.binding.items())),
        )
        self.token_strs = frozenset(str(t) for t in self.tokens.values())
        # Token-free literals hold exactly when the atom is (not) in the
        # state, so they reduce to set operations.
        exact_pos, exact_neg, fuzzy = [], [], []
        for lit in self.precondition:
            if all(isinstance(a, str) and not is_token(a) for a in lit.args):
                (exact_pos if lit.positive else exact_neg).append(lit.atom)
            else:
                fuzzy.append(lit)
        self._exact_pos = frozenset(exact_pos)
        self._exact_neg = frozenset(exact_neg)
        self._fuzzy_pre = tuple(fuzzy)
        keys = set()
        for lit in self.guards + self.precondition:
            keys.add((lit.pred,) + tuple(format_value(a) for a in lit.args))
        # Whole-action infeasibility, learned when no candidate value can
        # even be generated.
        keys.add((schema.name,) + objargs)
        self.block_keys = frozenset(keys)

    @property
    def name(self) -> str:
        return self.abstract.name

    @property
    def cost(self) -> float:
        return self.abstract.cost

    def __repr__(self) -> str:
        args = " ".join(self.binding[p] for p in self.abstract.schema.object_params)
        return f"({self.name} {args})" if args else f"({self.name})"

    def measure_product(self, params=None) -> float:
        """Refinement cost estimate: product of descriptor measures over the
        (still unrefined) continuous parameters; empty product is one."""
        out = 1.0
        for param, tok in self.tokens.items():
            if params is None or param in params:
                out *= tok.spec.measure
        return out

    def blocked_by(self, state: frozenset) -> bool:
        """A learned failure fact gates this action until it is cleared."""
        for atom in state:
            if atom.pred == OBSTRUCTS:
                if len(atom.args) == 2 and str(atom.args[0]) in self.token_strs:
                    return True
            elif atom.pred == UNATTAINABLE:
                key = tuple(format_value(a) for a in atom.args[1:])
                if (str(atom.args[0]),) + key in self.block_keys:
                    return True
        return False

    def applicable(self, state: frozenset) -> bool:
        if not self._exact_pos <= state or self._exact_neg & state:
            return False
        return all(satisfies(state, l) for l in self._fuzzy_pre) and \
            not self.blocked_by(state)

    def apply(self, state: frozenset, outcome_index: int) -> frozenset:
        _, effects = self.outcomes[outcome_index]
        atoms = set(state)
        removed = []
        for eff in effects:
            if eff.positive:
                continue
            victims = [
                a for a in atoms
                if a.pred == eff.pred
                and len(a.args) == len(eff.args)
                and all(_compatible(sa, ca) for sa, ca in zip(a.args, eff.args))
            ]
            for v in victims:
                atoms.discard(v)
                removed.append(v)
        # An entity that moved no longer obstructs what it used to obstruct.
        moved = {
            a
            for atom in removed
            if any(is_token(x) for x in atom.args)
            for a in atom.args
            if is_object_name(a)
        }
        if moved:
            atoms = {
                a for a in atoms
                if not (a.pred == OBSTRUCTS and len(a.args) == 2 and a.args[1] in moved)
            }
        for eff in effects:
            if eff.positive:
                atoms.add(eff.atom)
        return frozenset(atoms)


def _unify(lit: Literal, atom: Literal, binding: dict, object_params: set):
    """Extend ``binding`` so ``lit`` matches ``atom``, object positions only.
    Returns the extended binding or None."""
    out = dict(binding)
    for larg, aarg in zip(lit.args, atom.args):
        if is_variable(larg):
            if larg not in object_params:
                continue
            if larg in out:
                if out[larg] != aarg:
                    return None
            elif isinstance(aarg, str):
                out[larg] = aarg
            else:
                return None
        else:
            if lift_value(larg) != lift_value(aarg):
                return None
    return out


class AbstractModel:
    """The abstract stochastic model induced by entity abstraction, plus
    any failure facts learned by refinement."""

    def __init__(self, source: ConcreteModel, learned_facts=frozenset(),
                 _shared=None):
        self.source = source
        self.learned_facts = frozenset(learned_facts)
        if _shared is not None:
            (self.actions, self._ground, self._static_preds) = _shared
        else:
            self.actions = {
                name: abstract_action(schema)
                for name, schema in sorted(source.actions.items())
            }
            self._static_preds = self._compute_statics()
            self._ground = self._ground_all()
        self.horizon = source.horizon
        self.goal = tuple(_lift_literal(l) for l in source.goal)
        self._app_cache: dict = {}
        self._goal_cache: dict = {}

    def with_fact(self, fact: Literal) -> "AbstractModel":
        return AbstractModel(
            self.source,
            self.learned_facts | {fact},
            _shared=(self.actions, self._ground, self._static_preds),
        )

    def _compute_statics(self) -> frozenset:
        """Predicates whose atoms never change, so grounding can unify
        against the initial state.  Geometric predicates are excluded:
        they are evaluated, not stored."""
        dynamic = {
            eff.pred
            for schema in self.source.actions.values()
            for _, effects in schema.outcomes
            for eff in effects
        }
        return frozenset(
            p for p in self.source.universe.predicates
            if p not in dynamic and p not in GEOMETRIC_PREDICATES
        )

    def _ground_all(self) -> tuple:
        static_atoms: dict[str, list] = {}
        for atom in self.source.initial.literals:
            if atom.pred in self._static_preds:
                static_atoms.setdefault(atom.pred, []).append(atom)
        for atoms in static_atoms.values():
            atoms.sort(key=Literal.sort_key)

        objects = self.source.universe.objects
        out = []
        for name in sorted(self.actions):
            aa = self.actions[name]
            schema = aa.schema
            object_params = set(schema.object_params)
            statics = [
                l for l in schema.precondition
                if l.positive and l.pred in self._static_preds
            ]
            statics.sort(key=lambda l: -sum(1 for a in l.args if is_variable(a)))
            bindings = [{}]
            for lit in statics:
                bindings = [
                    b2
                    for b in bindings
                    for atom in static_atoms.get(lit.pred, [])
                    for b2 in [_unify(lit, atom, b, object_params)]
                    if b2 is not None
                ]
                if not bindings:
                    break
            for b in bindings:
                stack = [b]
                for p in schema.object_params:
                    if p not in b:
                        stack = [{**bb, p: o} for bb in stack for o in objects]
                out.extend(
                    GroundAction(aa, bb, self.source.generators) for bb in stack
                )
        seen = {}
        for ga in out:
            seen.setdefault(ga.key, ga)
        return tuple(seen[k] for k in sorted(seen))

    def ground_actions(self) -> tuple:
        return self._ground

    def initial_state(self) -> frozenset:
        return alpha_state(self.source.initial) | self.learned_facts

    def is_goal(self, state: frozenset) -> bool:
        hit = self._goal_cache.get(state)
        if hit is None:
            hit = all(satisfies(state, l) for l in self.goal)
            self._goal_cache[state] = hit
        return hit

    def applicable(self, state: frozenset):
        hit = self._app_cache.get(state)
        if hit is None:
            hit = [ga for ga in self._ground if ga.applicable(state)]
            self._app_cache[state] = hit
        return hit

    def successors(self, state: frozenset, ga: GroundAction):
        return tuple(
            (prob, i, ga.apply(state, i))
            for i, (prob, _) in enumerate(ga.outcomes)
        )

    def is_transition(self, s_abs: frozenset, ga: GroundAction,
                      succ_abs: frozenset) -> bool:
        """Whether the abstract model allows ``s_abs --ga--> succ_abs``: the
        action must be applicable and some outcome must agree with the
        successor on symbolic atoms, with continuous atoms matched up to
        extent compatibility."""
        if not ga.applicable(s_abs):
            return False

        def hybrid(a: Literal) -> bool:
            return any(is_token(x) for x in a.args)

        def learned(a: Literal) -> bool:
            return a.pred in (OBSTRUCTS, UNATTAINABLE)

        def matches(result: frozenset) -> bool:
            sym_result = {a for a in result if not hybrid(a) and not learned(a)}
            sym_succ = {a for a in succ_abs if not hybrid(a) and not learned(a)}
            if sym_result != sym_succ:
                return False
            hyb_result = [a for a in result if hybrid(a)]
            for a in succ_abs:
                if not hybrid(a):
                    continue
                if not any(
                    b.pred == a.pred
                    and len(b.args) == len(a.args)
                    and all(_compatible(x, y) or _compatible(y, x)
                            for x, y in zip(a.args, b.args))
                    for b in hyb_result
                ):
                    return False
            return True

        return any(
            matches(ga.apply(s_abs, i)) for i in range(len(ga.outcomes))
        )


# --- concretization -------------------------------------------------------

@dataclass
class ConcretizeResult:
    ok: bool
    binding: dict | None = None
    attempts: int = 0
    reasons: tuple = ()
    failed: Literal | None = None
    exhausted: bool = False


def _failure_facts(lit: Literal, witnesses, tokens: dict, binding=None) -> list:
    """Translate a violated precondition into its abstract-level true form:
    per-witness obstruction facts when entities are to blame, otherwise a
    single infeasibility fact naming the action's references.

    ``lit`` keeps its variables; each variable of a continuous parameter
    turns into that parameter's reference token so the fact gates exactly
    the ground action it was learned about."""
    binding = binding or {}

    def materialize(a):
        if is_variable(a):
            if a in tokens:
                return tokens[a]
            v = binding.get(a, a)
            a = v
        if isinstance(a, tuple):
            return ValTok(a)
        return a if isinstance(a, str) else format_value(a)

    if witnesses:
        anchor = None
        for a in lit.args:
            if is_variable(a) and a in tokens:
                anchor = tokens[a]
        if anchor is not None:
            return [Literal(OBSTRUCTS, (anchor, w)) for w in sorted(witnesses)]
    return [
        Literal(UNATTAINABLE,
                (lit.pred,) + tuple(materialize(a) for a in lit.args))
    ]


def concretize_action(state: ConcreteState, ga: GroundAction, rng, *,
                      budget: int = DEFAULT_CONCRETIZE_BUDGET,
                      explore: bool = False,
                      motion_budget: int = DEFAULT_MOTION_BUDGET,
                      count_attempt=None) -> ConcretizeResult:
    """Search for concrete values of the action's continuous parameters.

    Backtracks over candidate values in declaration order (trajectories
    last, planned between already-bound endpoint configurations).  Every
    precondition is checked as soon as its arguments are bound; an attempt
    is counted whenever a candidate is rejected or a full binding reached.
    On failure the result carries the distinct violated ground facts, in
    their abstract true form, for the worst violated precondition.
    """
    schema = ga.abstract.schema
    params = [p for p in schema.continuous_params
              if not schema.param_types[p].trajectory]
    params += [p for p in schema.continuous_params
               if schema.param_types[p].trajectory]

    bound_at = {p: i for i, p in enumerate(params)}
    checks: list[list[Literal]] = [[] for _ in range(len(params) + 1)]
    for lit in schema.precondition:
        depth = 0
        for a in lit.args:
            if is_variable(a) and a in bound_at:
                depth = max(depth, bound_at[a] + 1)
        checks[depth].append(lit)

    traj_endpoints = {}
    for lit in schema.precondition:
        if lit.pred == "is-valid-mp" and len(lit.args) == 3:
            t = lit.args[0]
            if is_variable(t) and t in schema.param_types and \
                    schema.param_types[t].trajectory:
                traj_endpoints[t] = (lit.args[1], lit.args[2])

    attempts = 0
    budget_hit = False
    # Keyed by the schema literal so failures of the same precondition
    # across candidate values pool their facts.  Facts backed by a witness
    # or a fully bound counterexample are strong evidence; the rest only
    # break ties when nothing stronger exists.
    failures: dict[str, dict] = {}

    def note_attempt():
        nonlocal attempts
        attempts += 1
        if count_attempt is not None:
            count_attempt()

    def record_failure(lit: Literal, binding: dict, witnesses, strong: bool):
        entry = failures.setdefault(
            str(lit), {"lit": lit, "strong": set(), "weak": set()})
        facts = _failure_facts(lit, witnesses, ga.tokens, binding)
        (entry["strong"] if (strong or witnesses) else entry["weak"]).update(facts)

    def run_checks(depth: int, binding: dict) -> bool:
        for lit in checks[depth]:
            ground = lit.substitute(binding)
            ok, witnesses = holds_with_witnesses(state, ground)
            if not ok:
                record_failure(lit, binding, witnesses, depth == len(params))
                return False
        return True

    def motion_candidates(param: str, binding: dict) -> list:
        ends = traj_endpoints.get(param)
        if ends is None:
            raise SemanticError(
                f"trajectory parameter {param} of {schema.name} needs an "
                f"is-valid-mp precondition tying it to endpoint configurations")
        try:
            start = binding[ends[0]] if is_variable(ends[0]) else ends[0]
            goal = binding[ends[1]] if is_variable(ends[1]) else ends[1]
        except KeyError as exc:
            raise SemanticError(
                f"trajectory endpoints of {schema.name} must be bound before "
                f"the trajectory parameter (declare {exc.args[0]} earlier)")
        spec = ga.tokens[param].spec
        scene = state.scene
        out = []
        for i in range(spec.cap):
            sub = random.Random(f"{rng.random()}:{i}")
            try:
                out.append(birrt.plan_motion(scene, start, goal, sub,
                                             budget=motion_budget))
            except StartOrGoalInCollision as exc:
                # Every candidate shares these endpoints, so record the
                # blockers once and give up on this branch.
                record_failure(Literal("is-collision-free", (param,)),
                               binding, exc.contacts, True)
                note_attempt()
                return []
            except OutOfBounds:
                note_attempt()
                return []
            except NoPlanFound:
                try:
                    out.append(
                        birrt.plan_motion(scene.static_only(), start, goal, sub,
                                          budget=motion_budget))
                except (NoPlanFound, StartOrGoalInCollision, OutOfBounds):
                    continue
        return out

    def descend(depth: int, binding: dict) -> dict | None:
        nonlocal budget_hit
        if depth == len(params):
            return dict(binding)
        param = params[depth]
        spec = ga.tokens[param].spec
        if spec.kind == "motion":
            cands = motion_candidates(param, binding)
        else:
            cands = spec.candidates(state, binding, rng, shuffle=explore)
        for value in cands:
            if attempts >= budget:
                budget_hit = True
                return None
            binding[param] = value
            if run_checks(depth + 1, binding):
                if depth + 1 == len(params):
                    note_attempt()
                    return dict(binding)
                result = descend(depth + 1, binding)
                if result is not None:
                    return result
            else:
                note_attempt()
            del binding[param]
        return None

    def failure_result(exhausted: bool) -> ConcretizeResult:
        best = None
        for key in sorted(failures):
            entry = failures[key]
            if best is None or len(entry["strong"]) > len(best["strong"]):
                best = entry
        if best is None:
            # No precondition was ever violated: the generators produced
            # nothing at all, so the ground action itself is infeasible.
            objargs = tuple(
                ga.binding[p] for p in ga.abstract.schema.object_params)
            fact = Literal(UNATTAINABLE, (ga.name,) + objargs)
            return ConcretizeResult(False, None, attempts, (fact,), None,
                                    exhausted=exhausted)
        reasons = best["strong"] or best["weak"]
        return ConcretizeResult(
            False, None, attempts,
            tuple(sorted(reasons, key=Literal.sort_key)), best["lit"],
            exhausted=exhausted)

    binding = dict(ga.binding)
    if not run_checks(0, binding):
        note_attempt()
        return failure_result(True)

    if not params:
        note_attempt()
        return ConcretizeResult(True, binding, attempts)

    result = descend(0, binding)
    if result is not None:
        return ConcretizeResult(True, result, attempts)

    restartable = any(
        ga.tokens[p].spec.kind in ("region", "motion") for p in params)
    return failure_result(not budget_hit and not restartable)


def estimate_cost(ga: GroundAction, unrefined_params=None) -> float:
    """Refinement effort estimate for one action (product of measures)."""
    return ga.measure_product(unrefined_params)
