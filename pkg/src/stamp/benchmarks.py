"""Benchmark domain builders.

Each builder returns a Benchmark carrying the domain and problem sources
plus the world geometry, ready to write to disk or to parse into a model.
Constructors are pure given their arguments; layout randomness enters
only through the explicit seed parameters.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import PlacementFailed
from .geometry import WorldModel
from .model import ConcreteModel
from .parser import Domain, parse_domain, parse_problem


@dataclass
class Benchmark:
    name: str
    domain_text: str
    problem_text: str
    world: WorldModel

    def write(self, directory: str) -> tuple[str, str, str]:
        os.makedirs(directory, exist_ok=True)
        dom = os.path.join(directory, f"{self.name}.sdom")
        prob = os.path.join(directory, f"{self.name}.sprob")
        world = os.path.join(directory, f"{self.name}.world")
        with open(dom, "w") as fh:
            fh.write(self.domain_text)
        with open(prob, "w") as fh:
            fh.write(self.problem_text)
        self.world.save(world)
        return dom, prob, world

    def domain(self) -> Domain:
        return parse_domain(self.domain_text)

    def model(self) -> ConcreteModel:
        return parse_problem(self.problem_text, self.domain(), world=self.world)


def _square(cx: float, cy: float, half: float):
    return [
        [cx - half, cy - half], [cx + half, cy - half],
        [cx + half, cy + half], [cx - half, cy + half],
    ]


def _frac(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


# --- find-the-can ----------------------------------------------------------

def build_find_the_can(prior_top: Fraction = Fraction(3, 5)) -> Benchmark:
    """A can ends up on one of two shelves; fetching it needs a grasp and a
    collision-free approach.  The policy has one branch per shelf."""
    prior_top = _frac(prior_top)
    if not 0 < prior_top <= 1:
        raise ValueError("prior must be in (0, 1]")
    rest = 1 - prior_top
    if rest == 0:
        place_effect = "(and (not (unplaced ?c)) (at ?c [2 2]))"
    else:
        place_effect = """(probabilistic
      {p} (and (not (unplaced ?c)) (at ?c [2 2]))
      {q} (and (not (unplaced ?c)) (at ?c [8 8])))""".format(
            p=prior_top, q=rest)
    domain = """\
(define (domain find-the-can)
  (:predicates
    (unplaced ?c)
    (at ?c (?p dim 2))
    (robot-at (?q dim 2))
    (hand-free)
    (holding ?c)
    (is-grasp-config ?c (?g dim 2))
    (is-valid-mp (?t traj) (?a dim 2) (?b dim 2))
    (is-collision-free (?t traj))
  )
  (:action env-place
    :parameters (?c)
    :precondition (unplaced ?c)
    :effect {place_effect}
  )
  (:action pick
    :parameters (?c (?q0 dim 2) (?p dim 2) (?g dim 2) (?t traj))
    :precondition (and (robot-at ?q0) (at ?c ?p) (hand-free)
                       (is-grasp-config ?c ?g)
                       (is-valid-mp ?t ?q0 ?g) (is-collision-free ?t))
    :effect (and (not (robot-at ?q0)) (not (at ?c ?p)) (not (hand-free))
                 (robot-at ?g) (holding ?c))
  )
)
""".format(place_effect=place_effect)
    problem = """\
(define (problem find-the-can-1)
  (:domain find-the-can)
  (:objects can1)
  (:init
    (hand-free)
    (robot-at [5 5])
    (unplaced can1)
  )
  (:goal (holding can1))
  (:horizon 12)
  (:generators
    ((pick ?q0) (:atoms robot-at))
    ((pick ?p) (:atoms at ?c))
    ((pick ?g) (:offsets ?p [0.5 0] [-0.5 0] [0 0.5] [0 -0.5]))
    ((pick ?t) (:motion cap 5))
  )
)
"""
    world = WorldModel(
        bounds=[[0, 10], [0, 10]],
        robot=_square(0, 0, 0.2),
        movables={"can1": _square(0, 0, 0.15)},
        regions={
            "shelf-a": _square(2, 2, 1.0),
            "shelf-b": _square(8, 8, 1.0),
        },
        params={"reach": 0.7},
    )
    return Benchmark("find-the-can", domain, problem, world)


# --- cluttered table -------------------------------------------------------

def _clutter_domain(crush_prob: Fraction) -> str:
    """Table-clearing domain.  Grasping a delicate can may crush it; a
    crushed can blocks the hand until it is disposed of, and disposal is
    expensive.  Normal cans never crush and can be set back down."""
    if crush_prob == 0:
        delicate_effect = """(and (not (robot-at ?q0)) (not (at ?c ?p))
                 (not (hand-free)) (robot-at ?g) (holding ?c))"""
    else:
        delicate_effect = """(probabilistic
      {ok} (and (not (robot-at ?q0)) (not (at ?c ?p)) (not (hand-free))
                (robot-at ?g) (holding ?c))
      {crush} (and (not (robot-at ?q0)) (not (at ?c ?p)) (not (hand-free))
                   (robot-at ?g) (holding ?c) (crushed ?c)))""".format(
            ok=1 - crush_prob, crush=crush_prob)
    return """\
(define (domain cluttered-table)
  (:predicates
    (at ?c (?p dim 2))
    (robot-at (?q dim 2))
    (hand-free)
    (holding ?c)
    (normal ?c)
    (delicate ?c)
    (crushed ?c)
    (disposed ?c)
    (is-grasp-config ?c (?g dim 2))
    (is-placement-config ?c (?g dim 2) (?p dim 2))
    (is-valid-mp (?t traj) (?a dim 2) (?b dim 2))
    (is-collision-free (?t traj))
  )
  (:action pick
    :parameters (?c (?q0 dim 2) (?p dim 2) (?g dim 2) (?t traj))
    :precondition (and (normal ?c) (at ?c ?p) (hand-free) (robot-at ?q0)
                       (is-grasp-config ?c ?g)
                       (is-valid-mp ?t ?q0 ?g) (is-collision-free ?t))
    :effect (and (not (robot-at ?q0)) (not (at ?c ?p)) (not (hand-free))
                 (robot-at ?g) (holding ?c))
  )
  (:action pick-delicate
    :parameters (?c (?q0 dim 2) (?p dim 2) (?g dim 2) (?t traj))
    :precondition (and (delicate ?c) (at ?c ?p) (hand-free) (robot-at ?q0)
                       (is-grasp-config ?c ?g)
                       (is-valid-mp ?t ?q0 ?g) (is-collision-free ?t))
    :effect {delicate_effect}
  )
  (:action place
    :parameters (?c (?q0 dim 2) (?p dim 2) (?g dim 2) (?t traj))
    :precondition (and (holding ?c) (not (crushed ?c)) (robot-at ?q0)
                       (is-placement-config ?c ?g ?p)
                       (is-valid-mp ?t ?q0 ?g) (is-collision-free ?t))
    :effect (and (not (holding ?c)) (not (robot-at ?q0)) (hand-free)
                 (at ?c ?p) (robot-at ?g))
  )
  (:action dispose
    :parameters (?c (?q0 dim 2) (?p dim 2) (?g dim 2) (?t traj))
    :precondition (and (holding ?c) (crushed ?c) (robot-at ?q0)
                       (is-placement-config ?c ?g ?p)
                       (is-valid-mp ?t ?q0 ?g) (is-collision-free ?t))
    :effect (and (not (holding ?c)) (not (robot-at ?q0)) (hand-free)
                 (disposed ?c) (robot-at ?g))
    :cost 5
  )
)
""".format(delicate_effect=delicate_effect)


_CLUTTER_GENERATORS = """\
  (:generators
    ((pick ?q0) (:atoms robot-at))
    ((pick ?p) (:atoms at ?c))
    ((pick ?g) (:offsets ?p [0.5 0] [-0.5 0] [0 0.5] [0 -0.5]))
    ((pick ?t) (:motion cap 5))
    ((pick-delicate ?q0) (:atoms robot-at))
    ((pick-delicate ?p) (:atoms at ?c))
    ((pick-delicate ?g) (:offsets ?p [0.5 0] [-0.5 0] [0 0.5] [0 -0.5]))
    ((pick-delicate ?t) (:motion cap 5))
    ((place ?q0) (:atoms robot-at))
    ((place ?p) (:region ([1 7] [3 7] [3 9] [1 9]) cap 20 measure 4))
    ((place ?g) (:offsets ?p [0.5 0] [-0.5 0] [0 0.5] [0 -0.5]))
    ((place ?t) (:motion cap 5))
    ((dispose ?q0) (:atoms robot-at))
    ((dispose ?p) (:region ([7 1] [9 1] [9 3] [7 3]) cap 20 measure 4))
    ((dispose ?g) (:offsets ?p [0.5 0] [-0.5 0] [0 0.5] [0 -0.5]))
    ((dispose ?t) (:motion cap 5))
  )"""

# The four tight neighbours of the target: every grasp offset on the
# target touches exactly the two cans adjacent to it, so the north
# approach needs only normal cans moved while the south needs delicate
# ones.
_RING = (
    ("can-ne", 5.45, 5.45, "normal"),
    ("can-nw", 4.55, 5.45, "normal"),
    ("can-sw", 4.55, 4.55, "delicate"),
    ("can-se", 5.45, 4.55, "delicate"),
)


def _scatter(rng: random.Random, existing: list, count: int):
    """Clutter positions in the east strip, clear of the work area."""
    placed = []
    for _ in range(count):
        for _attempt in range(200):
            x = rng.uniform(6.0, 9.2)
            y = rng.uniform(0.8, 9.2)
            if 6.7 <= x and y <= 3.3:
                continue  # keep the disposal corner open
            if all((x - ex) ** 2 + (y - ey) ** 2 >= 0.9 ** 2
                   for ex, ey in existing + placed):
                placed.append((x, y))
                break
        else:
            raise PlacementFailed(
                f"no room for clutter can {len(placed) + 1} of {count}")
    return placed


def _clutter_world(movable_halves: dict) -> WorldModel:
    movables = {name: _square(0, 0, half)
                for name, half in movable_halves.items()}
    return WorldModel(
        bounds=[[0, 10], [0, 10]],
        robot=_square(0, 0, 0.2),
        movables=movables,
        regions={"drop-zone": [[1, 7], [3, 7], [3, 9], [1, 9]],
                 "trash": [[7, 1], [9, 1], [9, 3], [7, 3]]},
        params={"reach": 0.7},
    )


def build_cluttered_table(n_cans: int = 8,
                          crush_prob: Fraction = Fraction(1, 10),
                          seed: int = 0) -> Benchmark:
    """A target can amid n_cans - 1 others, some delicate.  Delicate
    grasps may crush, and a crushed can must be disposed of at a cost, so
    good policies clear a route through normal cans when one exists."""
    crush_prob = _frac(crush_prob)
    if not 0 <= crush_prob < 1:
        raise ValueError("crush probability must be in [0, 1)")
    if n_cans < 1:
        raise ValueError("n_cans must be at least 1")
    ring = _RING[:min(n_cans - 1, len(_RING))]
    rng = random.Random(seed)
    anchors = [(5.0, 5.0)] + [(x, y) for _, x, y, _ in ring]
    loose = _scatter(rng, anchors, n_cans - 1 - len(ring))
    objects = ["target-can"] + [name for name, _, _, _ in ring]
    halves = {"target-can": 0.15}
    init = [
        "(hand-free)",
        "(robot-at [2 5])",
        "(at target-can [5 5])",
        "(normal target-can)",
    ]
    for name, x, y, kind in ring:
        init.append(f"(at {name} [{x} {y}])")
        init.append(f"({kind} {name})")
        halves[name] = 0.25
    for k, (x, y) in enumerate(loose, start=1):
        name = f"can{k}"
        kind = "normal" if k % 2 else "delicate"
        objects.append(name)
        init.append(f"(at {name} [{x:.3f} {y:.3f}])")
        init.append(f"({kind} {name})")
        halves[name] = 0.2
    problem = """\
(define (problem cluttered-table-{n})
  (:domain cluttered-table)
  (:objects {objects})
  (:init
    {init}
  )
  (:goal (holding target-can))
  (:horizon 20)
{generators}
)
""".format(n=n_cans, objects=" ".join(objects), init="\n    ".join(init),
           generators=_CLUTTER_GENERATORS)
    return Benchmark("cluttered-table", _clutter_domain(crush_prob), problem,
                     _clutter_world(halves))


def build_surrounded_red(n_cans: int = 4) -> Benchmark:
    """The obstruction-learning instance alone: fetch the target out of a
    sealed ring of ordinary cans."""
    if not 1 <= n_cans <= len(_RING):
        raise ValueError(f"n_cans must be between 1 and {len(_RING)}")
    ring = _RING[:n_cans]
    objects = ["red-can"] + [name for name, _, _, _ in ring]
    halves = {"red-can": 0.15}
    init = ["(hand-free)", "(robot-at [2 5])",
            "(at red-can [5 5])", "(normal red-can)"]
    for name, x, y, _ in ring:
        init.append(f"(at {name} [{x} {y}])")
        init.append(f"(normal {name})")
        halves[name] = 0.25
    problem = """\
(define (problem surrounded-red-1)
  (:domain cluttered-table)
  (:objects {objects})
  (:init
    {init}
  )
  (:goal (holding red-can))
  (:horizon 20)
{generators}
)
""".format(objects=" ".join(objects), init="\n    ".join(init),
           generators=_CLUTTER_GENERATORS)
    return Benchmark("surrounded-red", _clutter_domain(Fraction(1, 10)),
                     problem, _clutter_world(halves))


# --- tray delivery ---------------------------------------------------------

def build_tray_table(drop_prob: Fraction = Fraction(1, 5)) -> Benchmark:
    """Set a table with two plates and two glasses using a tray.  Carrying
    one or two items is safe; stacking on a third risks dropping the lot,
    and broken dinnerware can never be delivered."""
    drop_prob = _frac(drop_prob)
    if not 0 <= drop_prob < 1:
        raise ValueError("drop probability must be in [0, 1)")
    if drop_prob == 0:
        risky_effect = "(and (not (at-base)) (at-dest))"
    else:
        risky_effect = """(probabilistic
      {keep} (and (not (at-base)) (at-dest))
      {drop} (and (not (at-base)) (at-dest) (broken-load)))""".format(
            keep=1 - drop_prob, drop=drop_prob)
    domain = """\
(define (domain tray-table)
  (:predicates
    (item ?i)
    (on-table ?i)
    (on-tray ?i)
    (delivered ?i)
    (count ?n)
    (succ ?a ?b)
    (safe-load ?n)
    (overload ?n)
    (at-base)
    (at-dest)
    (broken-load)
  )
  (:action load
    :parameters (?i ?a ?b)
    :precondition (and (item ?i) (on-table ?i) (at-base)
                       (count ?a) (succ ?a ?b))
    :effect (and (not (on-table ?i)) (on-tray ?i)
                 (not (count ?a)) (count ?b))
  )
  (:action unload
    :parameters (?i ?a ?b)
    :precondition (and (item ?i) (on-tray ?i) (at-dest)
                       (not (broken-load))
                       (count ?a) (succ ?b ?a))
    :effect (and (not (on-tray ?i)) (delivered ?i)
                 (not (count ?a)) (count ?b))
  )
  (:action carry
    :parameters (?n)
    :precondition (and (at-base) (count ?n) (safe-load ?n))
    :effect (and (not (at-base)) (at-dest))
  )
  (:action carry-stacked
    :parameters (?n)
    :precondition (and (at-base) (count ?n) (overload ?n))
    :effect {risky_effect}
  )
  (:action return
    :parameters ()
    :precondition (at-dest)
    :effect (and (not (at-dest)) (at-base))
  )
)
""".format(risky_effect=risky_effect)
    items = ["plate1", "plate2", "glass1", "glass2"]
    counts = [f"n{k}" for k in range(len(items) + 1)]
    init = ["(at-base)", "(count n0)"]
    for a, b in zip(counts, counts[1:]):
        init.append(f"(succ {a} {b})")
    init += ["(safe-load n1)", "(safe-load n2)",
             "(overload n3)", "(overload n4)"]
    for i in items:
        init.append(f"(item {i})")
        init.append(f"(on-table {i})")
    goal = " ".join(f"(delivered {i})" for i in items)
    problem = """\
(define (problem tray-table-1)
  (:domain tray-table)
  (:objects {objects})
  (:init
    {init}
  )
  (:goal (and {goal}))
  (:horizon 14)
)
""".format(objects=" ".join(items + counts),
           init="\n    ".join(init), goal=goal)
    world = WorldModel(bounds=[[0, 10], [0, 10]], robot=_square(0, 0, 0.2))
    return Benchmark("tray-table", domain, problem, world)


# --- plank stacking --------------------------------------------------------

def build_stacking(n_blocks: int = 5,
                   alt_prob: Fraction = Fraction(1, 5)) -> Benchmark:
    """Build a structure from planks handed over one at a time.  Each new
    plank shows up at the primary staging spot or, less often, at the
    alternate one, so the policy forks once per plank: 2^n contingencies,
    all of which pick from the revealed spot and put down on the next
    slot of the structure."""
    alt_prob = _frac(alt_prob)
    if not 0 <= alt_prob < 1:
        raise ValueError("alternate-spot probability must be in [0, 1)")
    if n_blocks < 1:
        raise ValueError("n_blocks must be at least 1")
    if alt_prob == 0:
        spawn_effect = """(and (not (on-deck ?b)) (on-deck ?bn) (loose ?b)
                 (at ?b [2 8]))"""
    else:
        spawn_effect = """(probabilistic
      {main} (and (not (on-deck ?b)) (on-deck ?bn) (loose ?b) (at ?b [2 8]))
      {alt} (and (not (on-deck ?b)) (on-deck ?bn) (loose ?b) (at ?b [2 2])))""".format(
            main=1 - alt_prob, alt=alt_prob)
    domain = """\
(define (domain stacking)
  (:predicates
    (on-deck ?b)
    (follows ?bn ?b)
    (loose ?b)
    (at ?b (?p dim 2))
    (robot-at (?q dim 2))
    (hand-free)
    (holding ?b)
    (slot-open ?s)
    (slot-filled ?s)
    (slot-order ?s ?prev)
    (slot-at ?s (?p dim 2))
    (in-slot ?b ?s)
    (is-grasp-config ?b (?g dim 2))
    (is-placement-config ?b (?g dim 2) (?p dim 2))
    (is-valid-mp (?t traj) (?a dim 2) (?b dim 2))
    (is-collision-free (?t traj))
  )
  (:action spawn
    :parameters (?b ?bn)
    :precondition (and (on-deck ?b) (follows ?bn ?b))
    :effect {spawn_effect}
  )
  (:action pick
    :parameters (?b (?q0 dim 2) (?p dim 2) (?g dim 2) (?t traj))
    :precondition (and (loose ?b) (at ?b ?p) (hand-free) (robot-at ?q0)
                       (is-grasp-config ?b ?g)
                       (is-valid-mp ?t ?q0 ?g) (is-collision-free ?t))
    :effect (and (not (robot-at ?q0)) (not (at ?b ?p)) (not (loose ?b))
                 (not (hand-free)) (robot-at ?g) (holding ?b))
  )
  (:action put
    :parameters (?b ?s ?prev (?q0 dim 2) (?p dim 2) (?g dim 2) (?t traj))
    :precondition (and (holding ?b) (robot-at ?q0)
                       (slot-open ?s) (slot-order ?s ?prev)
                       (slot-filled ?prev) (slot-at ?s ?p)
                       (is-placement-config ?b ?g ?p)
                       (is-valid-mp ?t ?q0 ?g) (is-collision-free ?t))
    :effect (and (not (holding ?b)) (not (robot-at ?q0)) (hand-free)
                 (robot-at ?g) (at ?b ?p) (not (slot-open ?s))
                 (slot-filled ?s) (in-slot ?b ?s))
  )
)
""".format(spawn_effect=spawn_effect)
    blocks = [f"b{k}" for k in range(1, n_blocks + 1)] + ["b-done"]
    slots = [f"s{k}" for k in range(n_blocks + 1)]
    init = ["(hand-free)", "(robot-at [5 5])", "(on-deck b1)",
            "(slot-filled s0)"]
    for bn, b in zip(blocks[1:], blocks):
        init.append(f"(follows {bn} {b})")
    for k in range(1, n_blocks + 1):
        y = 2.0 + 1.3 * (k - 1)
        init.append(f"(slot-open s{k})")
        init.append(f"(slot-order s{k} s{k - 1})")
        init.append(f"(slot-at s{k} [7.5 {y:g}])")
    problem = """\
(define (problem stacking-{n})
  (:domain stacking)
  (:objects {objects})
  (:init
    {init}
  )
  (:goal (slot-filled s{n}))
  (:horizon {horizon})
  (:generators
    ((pick ?q0) (:atoms robot-at))
    ((pick ?p) (:atoms at ?b))
    ((pick ?g) (:offsets ?p [0.5 0] [-0.5 0] [0 0.5] [0 -0.5]))
    ((pick ?t) (:motion cap 5))
    ((put ?q0) (:atoms robot-at))
    ((put ?p) (:atoms slot-at ?s))
    ((put ?g) (:offsets ?p [0.5 0] [-0.5 0] [0 0.5] [0 -0.5]))
    ((put ?t) (:motion cap 5))
  )
)
""".format(n=n_blocks, objects=" ".join(blocks + slots),
           init="\n    ".join(init), horizon=3 * n_blocks + 3)
    world = WorldModel(
        bounds=[[0, 10], [0, 10]],
        robot=_square(0, 0, 0.2),
        movables={b: _square(0, 0, 0.2) for b in blocks if b != "b-done"},
        params={"reach": 0.7},
    )
    return Benchmark("stacking", domain, problem, world)


# --- inspection tour -------------------------------------------------------

def build_inspection(sensor_fail: Fraction = Fraction(1, 20),
                     drift: Fraction = Fraction(1, 10),
                     battery: int = 4) -> Benchmark:
    """A UAV tours waypoints behind a wall with limited range per hop.
    Flights can drift to a neighbouring waypoint, sensing can fail, and
    charging (at base only) is itself unreliable."""
    sensor_fail = _frac(sensor_fail)
    drift = _frac(drift)
    if not 0 <= sensor_fail < 1:
        raise ValueError("sensor failure probability must be in [0, 1)")
    if not 0 <= drift < 1:
        raise ValueError("drift probability must be in [0, 1)")
    if battery < 2:
        raise ValueError("battery capacity must be at least 2")
    main = 1 - drift
    half_drift = drift / 2
    sense_ok = 1 - sensor_fail
    charge_ok = Fraction(17, 20)
    charge_fail = 1 - charge_ok
    if drift == 0:
        fly_effect = """(and (not (uav-at ?a)) (not (uav-config ?q0))
                  (not (battery ?ba))
                  (uav-at ?b) (uav-config ?q1) (battery ?bb))"""
    else:
        fly_effect = """(probabilistic
      {main} (and (not (uav-at ?a)) (not (uav-config ?q0)) (not (battery ?ba))
                  (uav-at ?b) (uav-config ?q1) (battery ?bb))
      {d} (and (not (uav-at ?a)) (not (uav-config ?q0)) (not (battery ?ba))
               (uav-at ?d1) (uav-config ?qd1) (battery ?bb))
      {d} (and (not (uav-at ?a)) (not (uav-config ?q0)) (not (battery ?ba))
               (uav-at ?d2) (uav-config ?qd2) (battery ?bb)))""".format(
            main=main, d=half_drift)
    if sensor_fail == 0:
        inspect_effect = "(inspected ?s)"
    else:
        inspect_effect = """(probabilistic
      {sok} (inspected ?s)
      {sfail} (and))""".format(sok=sense_ok, sfail=sensor_fail)
    domain = """\
(define (domain inspection)
  (:predicates
    (uav-at ?s)
    (uav-config (?q dim 2))
    (anchor ?s (?q dim 2))
    (drift-alt ?s ?d1 ?d2)
    (battery ?n)
    (succ-b ?a ?b)
    (inspectable ?s)
    (inspected ?s)
    (is-valid-mp (?t traj) (?a dim 2) (?b dim 2))
    (within-range (?t traj))
    (is-collision-free (?t traj))
  )
  (:action fly
    :parameters (?a ?b ?d1 ?d2 ?ba ?bb
                 (?q0 dim 2) (?q1 dim 2) (?qd1 dim 2) (?qd2 dim 2) (?t traj))
    :precondition (and (uav-at ?a) (uav-config ?q0)
                       (drift-alt ?b ?d1 ?d2)
                       (anchor ?b ?q1) (anchor ?d1 ?qd1) (anchor ?d2 ?qd2)
                       (battery ?ba) (succ-b ?bb ?ba)
                       (is-valid-mp ?t ?q0 ?q1) (within-range ?t)
                       (is-collision-free ?t))
    :effect {fly_effect}
  )
  (:action inspect
    :parameters (?s)
    :precondition (and (uav-at ?s) (inspectable ?s))
    :effect {inspect_effect}
  )
  (:action charge
    :parameters (?ba ?bb)
    :precondition (and (uav-at base) (battery ?ba) (succ-b ?ba ?bb))
    :effect (probabilistic
      {cok} (and (not (battery ?ba)) (battery ?bb))
      {cfail} (and))
  )
)
""".format(fly_effect=fly_effect, inspect_effect=inspect_effect,
           cok=charge_ok, cfail=charge_fail)
    sites = {
        "base": (10.0, 2.0),
        "w1": (3.0, 10.0),
        "w2": (10.0, 17.0),
        "w3": (17.0, 10.0),
    }
    alts = {
        "base": ("w1", "w3"),
        "w1": ("base", "w2"),
        "w2": ("w1", "w3"),
        "w3": ("w2", "base"),
    }
    levels = [f"b{k}" for k in range(battery + 1)]
    init = ["(uav-at base)", "(uav-config [10 2])", f"(battery b{battery})"]
    for s, (x, y) in sites.items():
        init.append(f"(anchor {s} [{x:g} {y:g}])")
    for s, (d1, d2) in alts.items():
        init.append(f"(drift-alt {s} {d1} {d2})")
    for k in range(battery):
        init.append(f"(succ-b b{k} b{k + 1})")
    for s in ("w1", "w2", "w3"):
        init.append(f"(inspectable {s})")
    problem = """\
(define (problem inspection-1)
  (:domain inspection)
  (:objects {objects})
  (:init
    {init}
  )
  (:goal (and (inspected w1) (inspected w2) (inspected w3)))
  (:horizon 30)
  (:generators
    ((fly ?q0) (:atoms uav-config))
    ((fly ?q1) (:atoms anchor ?b))
    ((fly ?qd1) (:atoms anchor ?d1))
    ((fly ?qd2) (:atoms anchor ?d2))
    ((fly ?t) (:motion cap 3))
  )
)
""".format(objects=" ".join(list(sites) + levels), init="\n    ".join(init))
    world = WorldModel(
        bounds=[[0, 20], [0, 20]],
        robot=_square(0, 0, 0.2),
        obstacles={"wall": [[6, 12], [14, 12], [14, 13], [6, 13]]},
        params={"move_range": 14.0},
    )
    return Benchmark("inspection", domain, problem, world)


BENCHMARKS = {
    "find-the-can": build_find_the_can,
    "cluttered-table": build_cluttered_table,
    "surrounded-red": build_surrounded_red,
    "tray-table": build_tray_table,
    "stacking": build_stacking,
    "inspection": build_inspection,
}
