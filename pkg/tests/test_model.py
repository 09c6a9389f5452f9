"""State semantics: holds, outcome application, serialization of values."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stamp.benchmarks import BENCHMARKS
from stamp.errors import PreconditionViolated, SemanticError, UnboundVariable
from stamp.geometry import Trajectory
from stamp.model import (
    ConcreteState,
    Literal,
    apply_outcome,
    holds,
    sorted_literals,
    value_from_json,
    value_to_json,
)
from stamp.parser import parse_domain, parse_problem

from conftest import SWITCH_DOMAIN, SWITCH_PROBLEM, make_model

PLACE_DOMAIN = """
(define (domain tiny-place)
  (:predicates (holding ?o) (hand-free) (at ?o (?p dim 2))
               (robot-at (?q dim 2)))
  (:action place
    :parameters (?obj (?q0 dim 2) (?q1 dim 2) (?pose dim 2))
    :precondition (and (robot-at ?q0) (holding ?obj))
    :effect (and (not (holding ?obj)) (not (robot-at ?q0))
                 (hand-free) (robot-at ?q1) (at ?obj ?pose))
  )
)
"""


def lit(pred, *args):
    return Literal(pred, args)


# --- holds ---------------------------------------------------------------------

def test_closed_world_negation_on_ground_atoms():
    state = ConcreteState(frozenset({lit("on", "s1")}))
    assert holds(state, lit("on", "s1"))
    assert not holds(state, lit("on", "s2"))
    assert holds(state, lit("on", "s2").negated)
    assert not holds(state, lit("on", "s1").negated)


def test_holds_requires_ground_literal():
    state = ConcreteState(frozenset())
    with pytest.raises(UnboundVariable):
        holds(state, lit("on", "?x"))


def test_empty_goal_conjunction_holds(switch_model):
    model = switch_model
    empty_goal = type(model)(
        name=model.name, universe=model.universe, actions=model.actions,
        initial=model.initial, goal=(), horizon=model.horizon,
        world=model.world, generators=model.generators)
    assert empty_goal.goal_holds(model.initial)


def test_holds_agrees_with_exhaustive_membership():
    """Brute-force oracle: symbolic truth is literal-set membership."""
    objects = ["a", "b", "c", "d", "e", "f"]
    rng = random.Random(7)
    preds = [("p", 1), ("q", 2), ("r", 0)]
    atoms = [lit(n, *combo)
             for n, arity in preds
             for combo in __import__("itertools").product(objects,
                                                          repeat=arity)]
    true_set = frozenset(a for a in atoms if rng.random() < 0.4)
    state = ConcreteState(true_set)
    for a in atoms:
        assert holds(state, a) == (a in true_set)
        assert holds(state, a.negated) == (a not in true_set)


# --- states ----------------------------------------------------------------------

def test_states_reject_negative_or_open_literals():
    with pytest.raises(SemanticError):
        ConcreteState(frozenset({lit("on", "s1").negated}))
    with pytest.raises(SemanticError):
        ConcreteState(frozenset({lit("on", "?x")}))


def test_state_key_is_order_independent():
    a = ConcreteState(frozenset({lit("p", "x"), lit("q", "y")}))
    b = ConcreteState(frozenset({lit("q", "y"), lit("p", "x")}))
    assert a.key() == b.key()
    assert sorted_literals(a.literals) == sorted_literals(b.literals)


# --- applyOutcome ------------------------------------------------------------------

def place_fixture():
    domain = parse_domain(PLACE_DOMAIN)
    schema = domain.actions["place"]
    state = ConcreteState(frozenset({
        lit("robot-at", (0.0, 0.0)), lit("holding", "box")}))
    binding = {"?obj": "box", "?q0": (0.0, 0.0), "?q1": (1.0, 1.0),
               "?pose": (1.0, 2.0)}
    return schema, state, binding


def test_place_outcome_effects():
    schema, state, binding = place_fixture()
    nxt = apply_outcome(state, schema, binding, 0)
    assert not holds(nxt, lit("holding", "box"))
    assert holds(nxt, lit("robot-at", (1.0, 1.0)))
    assert not holds(nxt, lit("robot-at", (0.0, 0.0)))
    assert holds(nxt, lit("at", "box", (1.0, 2.0)))
    assert holds(nxt, lit("hand-free"))


def test_apply_outcome_is_deterministic():
    schema, state, binding = place_fixture()
    assert apply_outcome(state, schema, binding, 0).literals == \
        apply_outcome(state, schema, binding, 0).literals


def test_apply_outcome_checks_preconditions():
    schema, state, binding = place_fixture()
    empty = ConcreteState(frozenset())
    with pytest.raises(PreconditionViolated):
        apply_outcome(empty, schema, binding, 0)


def test_empty_effect_leaves_state_unchanged():
    domain = parse_domain("""
    (define (domain d) (:predicates (p))
      (:action noop :parameters () :precondition (and) :effect (and)))
    """)
    state = ConcreteState(frozenset({lit("p")}))
    nxt = apply_outcome(state, domain.actions["noop"], {}, 0)
    assert nxt.literals == state.literals


def test_apply_outcome_agrees_with_naive_set_rewrite():
    """1000 fuzzed cases against an independent delete-then-add oracle."""
    rng = random.Random(42)
    objects = ["a", "b", "c"]
    domain = parse_domain("""
    (define (domain fuzz) (:predicates (p ?x) (q ?x ?y) (r))
      (:action act
        :parameters (?x ?y)
        :precondition (and)
        :effect (probabilistic
          1/2 (and (p ?x) (not (q ?x ?y)) (r))
          1/2 (and (not (p ?y)) (q ?y ?x) (not (r)))))
    )
    """)
    schema = domain.actions["act"]
    atoms = [lit("r")]
    atoms += [lit("p", o) for o in objects]
    atoms += [lit("q", o1, o2) for o1 in objects for o2 in objects]
    for _ in range(1000):
        state = ConcreteState(frozenset(
            a for a in atoms if rng.random() < 0.5))
        binding = {"?x": rng.choice(objects), "?y": rng.choice(objects)}
        idx = rng.randrange(2)
        got = apply_outcome(state, schema, binding, idx).literals

        # oracle: substitute by hand, delete before add
        def ground(l):
            return Literal(l.pred,
                           tuple(binding.get(a, a) for a in l.args),
                           l.positive)
        effects = [ground(l) for l in schema.outcomes[idx][1]]
        dels = {l.atom for l in effects if not l.positive}
        adds = {l for l in effects if l.positive}
        expected = (state.literals - dels) | adds
        assert got == expected


# --- benchmark-wide invariants -------------------------------------------------------

@pytest.mark.parametrize("name", sorted(BENCHMARKS))
def test_outcome_probabilities_sum_to_one_exactly(name):
    bench = BENCHMARKS[name]()
    domain = parse_domain(bench.domain_text)
    for schema in domain.actions.values():
        assert sum((p for p, _ in schema.outcomes), Fraction(0)) == 1


@pytest.mark.parametrize("name", sorted(BENCHMARKS))
def test_symbolic_actions_never_touch_hybrid_literals(name):
    bench = BENCHMARKS[name]()
    domain = parse_domain(bench.domain_text)
    for schema in domain.actions.values():
        if schema.kind != "symbolic":
            continue
        for _, effects in schema.outcomes:
            for eff in effects:
                assert domain.predicates[eff.pred].kind == "symbolic"


# --- binding-value serialization ------------------------------------------------------

@pytest.mark.parametrize("value", [
    "block-a",
    (1.5, -2.25),
    Trajectory(((0.0, 0.0), (0.5, 1.0), (2.0, 2.0))),
])
def test_value_json_round_trip(value):
    assert value_from_json(value_to_json(value)) == value


def test_value_json_rejects_garbage():
    with pytest.raises(SemanticError):
        value_to_json(object())
    with pytest.raises(SemanticError):
        value_from_json({"bogus": 1})


# --- hypothesis: closed world over random states ----------------------------------------

names = st.sampled_from(["a", "b", "c", "d"])
ground_atoms = st.builds(lambda p, args: lit(p, *args),
                         st.sampled_from(["p", "q"]),
                         st.lists(names, min_size=1, max_size=2))


@settings(max_examples=60, deadline=None)
@given(st.frozensets(ground_atoms, max_size=8), ground_atoms)
def test_closed_world_property(literals, probe):
    state = ConcreteState(literals)
    assert holds(state, probe.negated) == (not holds(state, probe))
