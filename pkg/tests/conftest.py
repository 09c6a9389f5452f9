"""Shared fixtures: small hand-written instances and cached benchmark runs."""

from __future__ import annotations

from fractions import Fraction

import pytest

from stamp.benchmarks import (
    build_cluttered_table,
    build_find_the_can,
    build_stacking,
    build_surrounded_red,
    build_tray_table,
)
from stamp.parser import parse_domain, parse_problem
from stamp.planner import HPlan, VirtualClock


# A purely symbolic two-switch domain; small enough to enumerate by hand.
SWITCH_DOMAIN = """
(define (domain switches)
  (:predicates (on ?s) (jammed ?s))
  (:action flip
    :parameters (?s)
    :precondition (and (not (on ?s)) (not (jammed ?s)))
    :effect (probabilistic 3/4 (and (on ?s)) 1/4 (and (jammed ?s)))
    :cost 1)
  (:action unjam
    :parameters (?s)
    :precondition (jammed ?s)
    :effect (and (not (jammed ?s)))
    :cost 2)
)
"""

SWITCH_PROBLEM = """
(define (problem both-on)
  (:domain switches)
  (:objects s1 s2)
  (:init)
  (:goal (and (on s1) (on s2)))
  (:horizon 12)
)
"""


def make_model(domain_text: str, problem_text: str, world=None):
    domain = parse_domain(domain_text)
    return parse_problem(problem_text, domain, world=world)


@pytest.fixture(scope="session")
def switch_model():
    return make_model(SWITCH_DOMAIN, SWITCH_PROBLEM)


def bench_model(bench):
    return parse_problem(bench.problem_text, parse_domain(bench.domain_text),
                         world=bench.world)


def run_hplan(bench, *, seed=0, stop_mass=Fraction(1), **kw):
    model = bench_model(bench)
    planner = HPlan(model, seed=seed, stop_mass=stop_mass,
                    clock=VirtualClock(), **kw)
    return model, planner.run()


@pytest.fixture(scope="session")
def find_the_can_run():
    return run_hplan(build_find_the_can())


@pytest.fixture(scope="session")
def tray_run():
    return run_hplan(build_tray_table())


@pytest.fixture(scope="session")
def stacking_run():
    return run_hplan(build_stacking())


@pytest.fixture(scope="session")
def surrounded_run():
    return run_hplan(build_surrounded_red())


@pytest.fixture(scope="session")
def clutter_hard_run():
    return run_hplan(build_cluttered_table(crush_prob=Fraction(9, 10)))
