"""Entity abstraction and concretization: lifting, compatibility,
generators, backtracking search, failure facts, and cost estimates."""

import itertools
import random
from collections import Counter
from fractions import Fraction

import pytest

from stamp.abstraction import (
    AbstractModel,
    GeneratorSpec,
    RefTok,
    ValTok,
    alpha_state,
    concretize_action,
    estimate_cost,
    is_token,
    satisfies,
)
from stamp.benchmarks import build_find_the_can, build_surrounded_red
from stamp.geometry import WorldModel, point_in_polygon
from stamp.model import ConcreteState, Literal, apply_outcome, holds
from stamp.parser import parse_domain, parse_problem

from conftest import bench_model, make_model, SWITCH_DOMAIN, SWITCH_PROBLEM


def lit(pred, *args):
    return Literal(pred, args)


@pytest.fixture(scope="module")
def ftc():
    model = bench_model(build_find_the_can())
    return model, AbstractModel(model)


def ground(abstract_model, name, *objargs):
    for ga in abstract_model.ground_actions():
        if ga.abstract.name == name and tuple(
                ga.binding[p] for p in ga.abstract.schema.object_params
        ) == tuple(objargs):
            return ga
    raise AssertionError(f"no ground action {name}{objargs}")


# --- alpha ---------------------------------------------------------------------

def test_empty_state_lifts_to_empty_abstract_state():
    assert alpha_state(ConcreteState(frozenset())) == frozenset()


def test_alpha_lifts_vectors_to_value_tokens():
    state = ConcreteState(frozenset({lit("at", "can", (2.0, 2.0)),
                                     lit("hand-free")}))
    lifted = alpha_state(state)
    assert lit("hand-free") in lifted
    hybrid = next(l for l in lifted if l.pred == "at")
    assert hybrid.args[0] == "can"
    assert isinstance(hybrid.args[1], ValTok)
    assert hybrid.args[1].vec == (2.0, 2.0)


def test_pose_inside_region_extent_satisfies_region_reference():
    table = ((0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0))
    spec = GeneratorSpec.region(table, cap=10)
    ref = RefTok("place", "?p", ("can",), spec)
    inside = alpha_state(ConcreteState(frozenset({
        lit("at", "can", (1.0, 1.0))})))
    outside = alpha_state(ConcreteState(frozenset({
        lit("at", "can", (9.0, 9.0))})))
    probe = lit("at", "can", ref)
    assert satisfies(inside, probe)
    assert not satisfies(outside, probe)


def test_satisfies_matches_brute_force_disjunction_over_finite_extent():
    values = tuple((float(i), float(j)) for i in range(4) for j in range(5))
    spec = GeneratorSpec.finite(values)
    ref = RefTok("a", "?v", (), spec)
    rng = random.Random(2)
    for _ in range(100):
        vec = (float(rng.randint(0, 5)), float(rng.randint(0, 5)))
        state = alpha_state(ConcreteState(frozenset({lit("p", vec)})))
        got = satisfies(state, lit("p", ref))
        assert got == any(vec == v for v in values)  # exhaustive disjunction


# --- abstraction of actions -------------------------------------------------------

def test_symbolic_model_abstraction_is_identity_on_actions(switch_model):
    am = AbstractModel(switch_model)
    for ga in am.ground_actions():
        assert ga.tokens == {}
        assert estimate_cost(ga) == 1.0  # empty product
        for l in itertools.chain(ga.precondition,
                                 *(effs for _, effs in ga.outcomes)):
            assert not any(is_token(a) for a in l.args)
    assert {ga.name for ga in am.ground_actions()} == {"flip", "unjam"}


def test_abstract_pick_effects_replace_values_with_references(ftc):
    _, am = ftc
    pick = ground(am, "pick", "can1")
    probs = [p for p, _ in pick.outcomes]
    assert probs == [Fraction(1)]
    effects = {(l.pred, l.positive) for l in pick.outcomes[0][1]}
    assert effects == {
        ("robot-at", False), ("at", False), ("hand-free", False),
        ("robot-at", True), ("holding", True),
    }
    eff = {l.pred: l for l in pick.outcomes[0][1] if l.positive}
    assert isinstance(eff["robot-at"].args[0], RefTok)
    assert eff["holding"].args == ("can1",)


# --- generators ---------------------------------------------------------------------

def test_finite_and_offset_candidates_in_declaration_order():
    spec = GeneratorSpec.finite(((1.0, 0.0), (0.0, 1.0)))
    state = ConcreteState(frozenset())
    assert spec.candidates(state, {}, random.Random(0)) == [
        (1.0, 0.0), (0.0, 1.0)]
    offs = GeneratorSpec.offsets("?p", ((0.5, 0.0), (-0.5, 0.0)))
    got = offs.candidates(state, {"?p": (2.0, 2.0)}, random.Random(0))
    assert got == [(2.5, 2.0), (1.5, 2.0)]


def test_region_samples_lie_inside_polygon_and_reproduce():
    poly = ((0.0, 0.0), (3.0, 0.0), (3.0, 2.0), (0.0, 2.0))
    spec = GeneratorSpec.region(poly, cap=20)
    state = ConcreteState(frozenset())
    a = spec.candidates(state, {}, random.Random(7))
    b = spec.candidates(state, {}, random.Random(7))
    assert a == b  # same seed, same yield sequence
    assert len(a) == 20
    assert all(point_in_polygon(v, poly) for v in a)


def test_atom_candidates_collect_matching_state_values():
    spec = GeneratorSpec.atoms("at", ("?c",))
    state = ConcreteState(frozenset({
        lit("at", "can1", (1.0, 1.0)),
        lit("at", "can2", (2.0, 2.0)),
    }))
    got = spec.candidates(state, {"?c": "can1"}, random.Random(0))
    assert got == [(1.0, 1.0)]


def test_explore_shuffle_is_seeded():
    spec = GeneratorSpec.finite(tuple((float(i), 0.0) for i in range(6)))
    state = ConcreteState(frozenset())
    a = spec.candidates(state, {}, random.Random(3), shuffle=True)
    b = spec.candidates(state, {}, random.Random(3), shuffle=True)
    c = spec.candidates(state, {}, random.Random(4), shuffle=True)
    assert a == b
    assert sorted(a) == sorted(c)


# --- cost estimates --------------------------------------------------------------------

def test_estimate_cost_of_pick_is_twenty(ftc):
    _, am = ftc
    pick = ground(am, "pick", "can1")
    assert estimate_cost(pick) == 20.0  # 4 grasp offsets x 5 trajectories


def test_estimate_cost_monotone_in_unrefined_set(ftc):
    _, am = ftc
    pick = ground(am, "pick", "can1")
    params = list(pick.tokens)
    for r in range(len(params) + 1):
        for subset in itertools.combinations(params, r):
            sub = estimate_cost(pick, frozenset(subset))
            for extra in params:
                if extra in subset:
                    continue
                bigger = estimate_cost(pick, frozenset(subset) | {extra})
                assert bigger >= sub  # each factor is a measure >= 1
    assert estimate_cost(pick, frozenset()) == 1.0


# --- concretization ---------------------------------------------------------------------

def test_zero_continuous_params_succeed_immediately(switch_model):
    am = AbstractModel(switch_model)
    flip = ground(am, "flip", "s1")
    res = concretize_action(switch_model.initial, flip, random.Random(0))
    assert res.ok and res.attempts == 1
    assert res.binding == flip.binding


def test_concretize_success_revalidates_every_precondition(ftc):
    model, am = ftc
    state = apply_outcome(model.initial, model.actions["env-place"],
                          {"?c": "can1"}, 0)
    pick = ground(am, "pick", "can1")
    res = concretize_action(state, pick, random.Random(1))
    assert res.ok
    for pre in pick.abstract.schema.precondition:
        assert holds(state, pre.substitute(res.binding))


def test_concretize_is_reproducible(ftc):
    model, am = ftc
    state = apply_outcome(model.initial, model.actions["env-place"],
                          {"?c": "can1"}, 0)
    pick = ground(am, "pick", "can1")
    r1 = concretize_action(state, pick, random.Random(5))
    r2 = concretize_action(state, pick, random.Random(5))
    assert r1.ok and r1.binding == r2.binding and r1.attempts == r2.attempts


def test_surrounded_target_fails_with_obstruction_facts():
    model = bench_model(build_surrounded_red())
    am = AbstractModel(model)
    pick = ground(am, "pick", "red-can")
    res = concretize_action(model.initial, pick, random.Random(0))
    assert not res.ok
    obstructors = {l.args[1] for l in res.reasons if l.pred == "obstructs"}
    assert len(obstructors) >= 2  # distinct facts for distinct blockers
    assert obstructors <= {"can-ne", "can-nw", "can-se", "can-sw"}
    # facts pool across candidates under the single violated precondition
    assert all(l.args[0] in {str(t) for t in pick.tokens.values()}
               for l in res.reasons if l.pred == "obstructs")


FINITE_DOMAIN = """
(define (domain grasping)
  (:predicates (at ?c (?p dim 2)) (robot-at (?q dim 2)) (hand-free)
               (holding ?c) (is-grasp-config ?c (?g dim 2))
               (is-valid-mp (?t traj) (?a dim 2) (?b dim 2))
               (is-collision-free (?t traj)))
  (:action pick
    :parameters (?c (?g dim 2) (?t traj))
    :precondition (and (hand-free) (is-grasp-config ?c ?g)
                       (is-valid-mp ?t [1 1] ?g) (is-collision-free ?t))
    :effect (and (not (hand-free)) (holding ?c)))
)
"""

FINITE_PROBLEM = """
(define (problem grasp-one)
  (:domain grasping)
  (:objects can)
  (:init (hand-free) (robot-at [1 1]) (at can [%s]))
  (:goal (holding can))
  (:horizon 4)
  (:generators
    ((pick ?g) (:finite [2 2] [2.2 2] [2 2.2] [2.2 2.2]))
    ((pick ?t) (:motion cap 5))
  )
)
"""


def finite_model(can_pos):
    world = WorldModel(
        bounds=((0.0, 10.0), (0.0, 10.0)),
        robot=((-0.1, -0.1), (0.1, -0.1), (0.1, 0.1), (-0.1, 0.1)),
    )
    return make_model(FINITE_DOMAIN, FINITE_PROBLEM % can_pos, world=world)


def test_finite_backtracking_bounded_and_matches_exhaustive_verdict():
    # reachable: the oracle (exhaustive scan of the 4-value extent against
    # the reach predicate) says feasible, and so does the search
    model = finite_model("2 2")
    am = AbstractModel(model)
    pick = ground(am, "pick", "can")
    assert estimate_cost(pick) == 20.0
    spec = pick.tokens["?g"].spec
    oracle_feasible = any(
        holds(model.initial, lit("is-grasp-config", "can", g))
        for g in spec.values
    )
    res = concretize_action(model.initial, pick, random.Random(0))
    assert res.ok == oracle_feasible is True
    assert res.attempts <= 20

    # out of reach: every extent value fails, search agrees and stops early
    far = finite_model("9 9")
    far_pick = ground(AbstractModel(far), "pick", "can")
    oracle_feasible = any(
        holds(far.initial, lit("is-grasp-config", "can", g))
        for g in far_pick.tokens["?g"].spec.values
    )
    res = concretize_action(far.initial, far_pick, random.Random(0))
    assert res.ok == oracle_feasible is False
    assert res.exhausted
    assert res.attempts <= 20
    assert res.reasons and all(l.pred == "unattainable" for l in res.reasons)
    assert res.failed.pred == "is-grasp-config"


# --- learned facts and gating ---------------------------------------------------------

def test_with_fact_grows_learned_facts_by_exactly_one(ftc):
    _, am = ftc
    fact = lit("unattainable", "probe")
    child = am.with_fact(fact)
    assert child.learned_facts == am.learned_facts | {fact}
    assert len(child.learned_facts) == len(am.learned_facts) + 1


def test_obstruction_fact_gates_action_until_blocker_moves():
    model = bench_model(build_surrounded_red())
    am = AbstractModel(model)
    pick_red = ground(am, "pick", "red-can")
    res = concretize_action(model.initial, pick_red, random.Random(0))
    fact = next(l for l in res.reasons if l.args[1] == "can-ne")
    child = am.with_fact(fact)
    state = child.initial_state()

    child_pick_red = ground(child, "pick", "red-can")
    child_pick_ne = ground(child, "pick", "can-ne")
    assert child_pick_red.blocked_by(state)
    assert not child_pick_red.applicable(state)
    assert child_pick_ne.applicable(state)

    # picking the blocker deletes its placement atom, which releases the
    # obstruction and unblocks the target
    after = child_pick_ne.apply(state, 0)
    assert not any(l.pred == "obstructs" for l in after)
    assert child_pick_red.applicable(after)


# --- lifted-transition soundness -------------------------------------------------------

def project(abstract_literals):
    """Collapse token values so lifted-concrete and abstract successors are
    comparable: hybrid literals keep predicate + entity args, symbolic
    literals stay whole."""
    sym, hyb = set(), Counter()
    for l in abstract_literals:
        if any(is_token(a) for a in l.args):
            hyb[(l.pred, tuple(a for a in l.args if not is_token(a)))] += 1
        else:
            sym.add(l)
    return sym, hyb


def test_sampled_concrete_transitions_lift_to_abstract_transitions(ftc):
    model, am = ftc
    samples = 0
    for seed in range(25):
        rng = random.Random(seed)
        env = model.actions["env-place"]
        for idx in range(2):
            s = model.initial
            ga_env = ground(am, "env-place", "can1")
            assert ga_env.applicable(alpha_state(s))
            s_env = apply_outcome(s, env, {"?c": "can1"}, idx)
            assert project(ga_env.apply(alpha_state(s), idx)) == \
                project(alpha_state(s_env))
            samples += 1

            pick = ground(am, "pick", "can1")
            assert pick.applicable(alpha_state(s_env))
            res = concretize_action(s_env, pick, rng)
            assert res.ok
            s_pick = apply_outcome(s_env, pick.abstract.schema,
                                   res.binding, 0)
            assert project(pick.apply(alpha_state(s_env), 0)) == \
                project(alpha_state(s_pick))
            samples += 1
    assert samples == 100
