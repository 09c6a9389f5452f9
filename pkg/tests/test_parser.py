"""Grammar, validation, and printer round-trips for domain/problem files."""

from fractions import Fraction

import pytest

from stamp.benchmarks import BENCHMARKS
from stamp.errors import ParseError, SemanticError
from stamp.parser import parse_domain, parse_problem, print_domain, print_problem

from conftest import SWITCH_DOMAIN, SWITCH_PROBLEM

PLACE_DOMAIN = """
(define (domain tabletop)
  (:predicates
    (holding ?o) (hand-free)
    (at ?o (?p dim 2))
    (robot-at (?q dim 2))
    (is-placement-config ?o (?q dim 2) (?p dim 2))
    (is-valid-mp (?t traj) (?a dim 2) (?b dim 2))
    (is-collision-free (?t traj))
  )
  (:action place
    :parameters (?obj (?q0 dim 2) (?q1 dim 2) (?pose dim 2) (?traj traj))
    :precondition (and (robot-at ?q0) (holding ?obj)
                       (is-placement-config ?obj ?q1 ?pose)
                       (is-valid-mp ?traj ?q0 ?q1)
                       (is-collision-free ?traj))
    :effect (and (not (holding ?obj)) (not (robot-at ?q0))
                 (hand-free) (robot-at ?q1) (at ?obj ?pose))
    :cost 1
  )
)
"""


# --- structural-equality oracle ---------------------------------------------

def domain_signature(domain):
    """Canonical nested tuples capturing everything a domain means."""
    preds = tuple(sorted(
        (name, tuple((t.kind, t.dim, t.trajectory) for t in p.params))
        for name, p in domain.predicates.items()
    ))
    actions = []
    for name in sorted(domain.actions):
        a = domain.actions[name]
        actions.append((
            name,
            tuple((p, t.kind, t.dim, t.trajectory) for p, t in a.params),
            tuple(sorted(str(l) for l in a.precondition)),
            tuple((prob, tuple(sorted(str(l) for l in effects)))
                  for prob, effects in a.outcomes),
            a.cost,
        ))
    return (domain.name, preds, tuple(actions))


def model_signature(model):
    gens = tuple(sorted(
        (key, spec.kind, spec.cap, spec.measure,
         spec.values, spec.anchor, spec.pred, spec.terms, spec.poly)
        for key, spec in model.generators.items()
    ))
    return (
        tuple(sorted(str(l) for l in model.initial.literals)),
        tuple(sorted(str(l) for l in model.goal)),
        model.horizon,
        tuple(sorted(model.universe.objects)),
        gens,
        model.world.to_json() if model.world is not None else None,
    )


# --- schema-level parsing ----------------------------------------------------

def test_place_schema_structure():
    domain = parse_domain(PLACE_DOMAIN)
    place = domain.actions["place"]
    assert [p for p, _ in place.params] == [
        "?obj", "?q0", "?q1", "?pose", "?traj"]
    kinds = {p: t.kind for p, t in place.params}
    assert kinds["?obj"] == "object"
    assert all(kinds[p] == "continuous"
               for p in ("?q0", "?q1", "?pose", "?traj"))
    assert {l.pred for l in place.precondition} == {
        "robot-at", "holding", "is-placement-config",
        "is-valid-mp", "is-collision-free"}
    assert len(place.outcomes) == 1
    prob, effect_lits = place.outcomes[0]
    assert prob == 1
    effects = {str(l) for l in effect_lits}
    assert "(not (holding ?obj))" in effects
    assert "(robot-at ?q1)" in effects
    assert "(at ?obj ?pose)" in effects
    assert "(not (robot-at ?q0))" in effects


def test_stochastic_outcomes_are_exact_rationals():
    text = PLACE_DOMAIN.replace(
        ":effect (and (not (holding ?obj)) (not (robot-at ?q0))\n"
        "                 (hand-free) (robot-at ?q1) (at ?obj ?pose))",
        ":effect (probabilistic\n"
        "      3/5 (and (not (holding ?obj)) (hand-free))\n"
        "      2/5 (and (at ?obj ?pose)))",
    )
    schema = parse_domain(text).actions["place"]
    probs = [prob for prob, _ in schema.outcomes]
    assert probs == [Fraction(3, 5), Fraction(2, 5)]
    assert all(isinstance(p, Fraction) for p in probs)
    # independent rational-sum check
    assert sum(probs, Fraction(0)) == Fraction(1)


def test_outcome_probabilities_must_sum_to_one():
    bad = SWITCH_DOMAIN.replace("3/4", "2/3")
    with pytest.raises(SemanticError, match="sum"):
        parse_domain(bad)


def test_goal_satisfied_by_initial_state_still_parses():
    domain = parse_domain(SWITCH_DOMAIN)
    text = SWITCH_PROBLEM.replace("(:init)", "(:init (on s1) (on s2))")
    model = parse_problem(text, domain)
    assert model.goal_holds(model.initial)


@pytest.mark.parametrize("mutate, exc", [
    (lambda t: t.replace("(on ?s)", ""), ParseError),          # undeclared pred
    (lambda t: t.replace("(jammed ?s))", "(jammed ?s ?s))"),
     ParseError),                                              # arity
    (lambda t: t + "(", ParseError),                           # unbalanced
])
def test_domain_errors_are_reported(mutate, exc):
    with pytest.raises(exc):
        parse_domain(mutate(SWITCH_DOMAIN))


def test_problem_validation_errors():
    domain = parse_domain(SWITCH_DOMAIN)
    with pytest.raises(SemanticError, match="domain"):
        parse_problem(SWITCH_PROBLEM.replace(
            "(:domain switches)", "(:domain other)"), domain)
    with pytest.raises(SemanticError, match="undeclared object"):
        parse_problem(SWITCH_PROBLEM.replace(
            "(:init)", "(:init (on s3))"), domain)


def test_parse_errors_carry_positions():
    try:
        parse_domain("(define (domain d) (:predicates (p))\n  (:action a"
                     " :parameters () :precondition (q) :effect (and (p))))")
    except ParseError as e:
        assert e.line == 2
    else:
        pytest.fail("expected a parse error")


# --- find-the-can prior -------------------------------------------------------

def test_find_the_can_prior_parses_exactly():
    bench = BENCHMARKS["find-the-can"]()
    domain = parse_domain(bench.domain_text)
    env = domain.actions["env-place"]
    assert [prob for prob, _ in env.outcomes] == [
        Fraction(3, 5), Fraction(2, 5)]


# --- printer round-trips --------------------------------------------------------

def test_domain_round_trip_is_structural_identity():
    domain = parse_domain(PLACE_DOMAIN)
    reparsed = parse_domain(print_domain(domain))
    assert domain_signature(reparsed) == domain_signature(domain)


def test_problem_round_trip_is_structural_identity():
    domain = parse_domain(SWITCH_DOMAIN)
    model = parse_problem(SWITCH_PROBLEM, domain)
    reparsed = parse_problem(print_problem(model, domain.name), domain)
    assert model_signature(reparsed) == model_signature(model)


@pytest.mark.parametrize("name", sorted(BENCHMARKS))
def test_benchmark_round_trip(name):
    bench = BENCHMARKS[name]()
    domain = parse_domain(bench.domain_text)
    model = parse_problem(bench.problem_text, domain, world=bench.world)
    dom2 = parse_domain(print_domain(domain))
    assert domain_signature(dom2) == domain_signature(domain)
    model2 = parse_problem(print_problem(model, domain.name), dom2,
                           world=bench.world)
    assert model_signature(model2) == model_signature(model)
