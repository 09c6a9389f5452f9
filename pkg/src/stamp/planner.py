"""Anytime planning by interleaved policy and abstraction refinement.

The planner keeps a graph of planning nodes (PRNs).  Each PRN owns an
abstract model (the base abstraction plus the failure facts learned on the
way to it), an abstract policy tree, and the refinement state of that
tree's edges.  Refining a policy tries to concretize the continuous
arguments along the most promising root-to-leaf path; refining the
abstraction turns a discovered failure fact into a child PRN whose policy
must work around it.  Progress is measured as covered mass: the exact
probability of the goal-reaching branches whose every edge has concrete
values.  The best snapshot seen so far is retained, so covered mass never
decreases and the loop can stop at any time.
"""

from __future__ import annotations

import csv
import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .abstraction import AbstractModel, _failure_facts, concretize_action
from .errors import (
    NoProperPolicy,
    PreconditionViolated,
    StateSpaceTooLarge,
)
from .model import (
    ConcreteModel,
    Literal,
    apply_outcome,
    format_value,
    holds_with_witnesses,
)
from .solver import (
    PolicyNode,
    PolicyTree,
    Solution,
    lao_star,
    solve_with_dynamic_horizon,
    unroll_policy,
)

DEFAULT_STOP_MASS = Fraction(3, 5)
PHASE_ATTEMPTS = 200
PHASE_SECONDS = 2.0
EDGE_ATTEMPTS = 5
EXPLORE_PROB = 0.1
REFINE_ABSTRACTION_PROB = 0.25

ATTEMPT_TICK = 0.001
SOLVE_TICK = 0.01


class RealClock:
    """Wall-clock time since construction."""

    def __init__(self):
        self._t0 = time.monotonic()

    def now(self) -> float:
        return time.monotonic() - self._t0

    def attempt(self):
        pass

    def charge(self, seconds: float):
        pass


class VirtualClock:
    """Deterministic time: advances only on counted work, so runs with the
    same seed produce byte-identical traces."""

    def __init__(self):
        self._t = 0.0

    def now(self) -> float:
        return self._t

    def attempt(self):
        self._t += ATTEMPT_TICK

    def charge(self, seconds: float):
        self._t += seconds


class _Rebased:
    """View of an abstract model whose initial state is a policy-tree node,
    for re-solving subtrees."""

    def __init__(self, base, state):
        self._base = base
        self._state = state
        self.horizon = base.horizon

    def initial_state(self):
        return self._state

    def is_goal(self, state):
        return self._base.is_goal(state)

    def applicable(self, state):
        return self._base.applicable(state)

    def successors(self, state, action):
        return self._base.successors(state, action)

    def ground_actions(self):
        return self._base.ground_actions()


def copy_tree(tree: PolicyTree) -> PolicyTree:
    """Structural copy sharing states and actions but not nodes, so a
    snapshot survives later surgery on the live tree."""
    clones = {
        n.id: PolicyNode(n.id, n.state, n.steps, n.action, n.goal)
        for n in tree.nodes
    }
    for n in tree.nodes:
        clones[n.id].edges = [
            (prob, idx, clones[child.id]) for prob, idx, child in n.edges
        ]
    return PolicyTree(clones[tree.root.id], [clones[n.id] for n in tree.nodes])


@dataclass
class Snapshot:
    """A retained refined policy: tree plus concrete bindings per node.
    ``goal_ok`` holds the ids of goal leaves whose branch was walked to the
    end and checked against the concrete goal."""

    prn_id: int
    tree: PolicyTree
    bindings: dict
    covered: Fraction
    facts: frozenset
    goal_ok: frozenset = frozenset()

    def to_json(self) -> dict:
        out = self.tree.to_json(self.bindings)
        out["covered_mass"] = str(self.covered)
        out["learned_facts"] = sorted(str(f) for f in self.facts)
        out["verified_leaves"] = sorted(self.goal_ok)
        return out


class PRN:
    """One node of the planning-refinement graph."""

    def __init__(self, pid: int, model: AbstractModel, concrete_initial,
                 parent=None, via_fact=None, sigma=()):
        self.id = pid
        self.model = model
        self.parent = parent
        self.via_fact = via_fact
        self.sigma = sigma
        self.solution: Solution | None = None
        self.tree: PolicyTree | None = None
        self.edge: dict = {}
        self.cstate: dict = {}
        self.goal_ok: set = set()
        self.pending: list = []
        self.pending_seen: set = set()
        self.children: dict = {}
        self.dead = False
        self.covered = Fraction(0)
        self._concrete_initial = concrete_initial
        self._next_id = 0

    def attach(self, solution: Solution, tree: PolicyTree):
        self.solution = solution
        self.tree = tree
        self.cstate[tree.root.id] = self._concrete_initial
        self._next_id = max(n.id for n in tree.nodes) + 1

    def edge_state(self, node_id: int) -> dict:
        return self.edge.setdefault(
            node_id, {"status": "unrefined", "binding": None, "attempts": 0})

    def goal_paths(self):
        if self.tree is None:
            return []
        return [p for p in self.tree.paths() if p[0].goal]

    def path_status(self, path):
        leaf, _, steps = path
        leaf_st = self.edge.get(leaf.id)
        if leaf_st is not None and leaf_st["status"] == "failed":
            return "failed"
        saw_unrefined = False
        for node, _, _, _ in steps:
            status = self.edge.get(node.id, {"status": "unrefined"})["status"]
            if status == "failed":
                return "failed"
            if status == "unrefined":
                saw_unrefined = True
        if saw_unrefined:
            return "refinable"
        # All edges concrete; the branch still needs its end-of-path goal
        # check before it may count as covered.
        return "refined" if leaf.id in self.goal_ok else "refinable"

    def refinable_paths(self):
        return [p for p in self.goal_paths() if self.path_status(p) == "refinable"]

    def path_cost(self, path) -> float:
        """Product of generator measures over the path's unrefined edges."""
        _, _, steps = path
        cost = 1.0
        for node, action, _, _ in steps:
            if self.edge.get(node.id, {"status": "unrefined"})["status"] == "unrefined":
                cost *= action.measure_product()
        return cost

    def best_ratio(self) -> float:
        best = 0.0
        for path in self.refinable_paths():
            best = max(best, float(path[1]) / self.path_cost(path))
        return best

    def recompute_covered(self):
        self.covered = sum(
            (p[1] for p in self.goal_paths() if self.path_status(p) == "refined"),
            Fraction(0),
        )

    def refined_bindings(self) -> dict:
        return {
            nid: st["binding"]
            for nid, st in self.edge.items()
            if st["status"] == "refined" and st["binding"] is not None
        }


@dataclass
class PRGEdge:
    parent: int
    child: int | None
    fact: Literal
    sigma: tuple
    unsolvable: bool = False


@dataclass
class PRG:
    prns: list = field(default_factory=list)
    edges: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "nodes": [
                {
                    "id": prn.id,
                    "facts": sorted(str(f) for f in prn.model.learned_facts),
                    "covered_mass": str(prn.covered),
                    "dead": prn.dead,
                    "via_fact": str(prn.via_fact) if prn.via_fact else None,
                }
                for prn in self.prns
            ],
            "edges": [
                {
                    "parent": e.parent,
                    "child": e.child,
                    "fact": str(e.fact),
                    "sigma": [
                        {
                            "action": name,
                            "binding": {
                                p: format_value(v) for p, v in sorted(b.items())
                            },
                        }
                        for name, b in e.sigma
                    ],
                    "unsolvable": e.unsolvable,
                }
                for e in self.edges
            ],
        }


@dataclass
class HPlanResult:
    best: Snapshot | None
    covered: Fraction
    prg: PRG
    ledger: list
    iterations: int
    elapsed: float
    stop_reason: str

    def solved(self, threshold: Fraction) -> bool:
        return self.covered >= threshold


def write_ledger(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["elapsed_seconds", "covered_mass", "event", "prn_id", "path_id"])
    for elapsed, covered, event, prn_id, path_id in rows:
        w.writerow([
            f"{elapsed:.6f}", str(covered), event, prn_id,
            "" if path_id is None else path_id,
        ])


def greedy_schedule(items):
    """Order refinement jobs by mass over cost; yields (index, completion
    time, cumulative mass) rows.  Against any schedule, the mass this
    ordering has covered by each completion time is at least half of what
    an optimal schedule could cover by the same time."""
    order = sorted(
        range(len(items)),
        key=lambda i: (-(float(items[i][0]) / items[i][1]), i),
    )
    out, t, m = [], 0.0, Fraction(0)
    for i in order:
        t += items[i][1]
        m += items[i][0]
        out.append((i, t, m))
    return out


class HPlan:
    """The anytime loop; construct and call ``run()``."""

    def __init__(self, model: ConcreteModel, *,
                 stop_mass: Fraction = DEFAULT_STOP_MASS,
                 seed: int = 0,
                 rng=None,
                 clock=None,
                 budget_seconds: float | None = None,
                 max_iterations: int = 100_000,
                 phase_attempts: int = PHASE_ATTEMPTS,
                 phase_seconds: float = PHASE_SECONDS,
                 edge_attempts: int = EDGE_ATTEMPTS,
                 explore_prob: float = EXPLORE_PROB,
                 refine_abstraction_prob: float = REFINE_ABSTRACTION_PROB,
                 max_tree_nodes: int = 4096,
                 select: str = "ratio",
                 solver=lao_star):
        import random as _random

        if select not in ("ratio", "random"):
            raise ValueError(f"unknown selection mode {select!r}")
        self.concrete = model
        if isinstance(stop_mass, float):
            stop_mass = Fraction(str(stop_mass))
        self.stop_mass = Fraction(stop_mass)
        self.rng = rng if rng is not None else _random.Random(seed)
        self.clock = clock if clock is not None else RealClock()
        self.budget_seconds = budget_seconds
        self.max_iterations = max_iterations
        self.phase_attempts = phase_attempts
        self.phase_seconds = phase_seconds
        self.edge_attempts = edge_attempts
        self.explore_prob = explore_prob
        self.refine_abstraction_prob = refine_abstraction_prob
        self.max_tree_nodes = max_tree_nodes
        self.select = select
        self.solver = solver
        self.prg = PRG()
        self.ledger: list = []
        self.best: Snapshot | None = None
        self.iterations = 0

    # -- bookkeeping --------------------------------------------------

    @property
    def covered(self) -> Fraction:
        return self.best.covered if self.best else Fraction(0)

    def log(self, event: str, prn_id=None, path_id=None):
        self.ledger.append(
            (self.clock.now(), self.covered, event, prn_id, path_id))

    def _solve(self, prn: PRN) -> bool:
        self.clock.charge(SOLVE_TICK)
        try:
            solution, tree = solve_with_dynamic_horizon(
                prn.model, solver=self.solver,
                target_mass=self.stop_mass,
                max_tree_nodes=self.max_tree_nodes)
        except (NoProperPolicy, StateSpaceTooLarge):
            prn.dead = True
            return False
        prn.attach(solution, tree)
        return True

    def _new_prn(self, model: AbstractModel, parent=None, via_fact=None,
                 sigma=()) -> PRN:
        prn = PRN(len(self.prg.prns), model, self.concrete.initial,
                  parent, via_fact, sigma)
        self.prg.prns.append(prn)
        return prn

    def _maybe_snapshot(self, prn: PRN):
        prn.recompute_covered()
        if prn.covered > self.covered:
            self.best = Snapshot(
                prn.id, copy_tree(prn.tree), dict(prn.refined_bindings()),
                prn.covered, prn.model.learned_facts,
                frozenset(prn.goal_ok))

    # -- phases -------------------------------------------------------

    def _select(self) -> PRN | None:
        eligible = [
            prn for prn in self.prg.prns
            if not prn.dead and prn.tree is not None
            and (prn.refinable_paths() or prn.pending)
        ]
        if not eligible:
            return None
        if self.select == "random":
            return self.rng.choice(eligible)
        best, best_ratio = None, None
        for prn in eligible:
            ratio = prn.best_ratio()
            if best is None or ratio > best_ratio:
                best, best_ratio = prn, ratio
        return best

    def _pick_path(self, prn: PRN):
        paths = prn.refinable_paths()
        if not paths:
            return None
        if self.select == "random":
            return self.rng.choice(paths)
        best, best_ratio = None, None
        for path in paths:
            ratio = float(path[1]) / prn.path_cost(path)
            if best is None or ratio > best_ratio:
                best, best_ratio = path, ratio
        return best

    def _note_failure(self, prn: PRN, facts, steps, upto: int):
        sigma = tuple(
            (steps[i][1].name, dict(prn.edge[steps[i][0].id]["binding"]))
            for i in range(upto)
            if prn.edge.get(steps[i][0].id, {}).get("binding")
        )
        for fact in facts:
            key = str(fact)
            if key in prn.pending_seen or fact in prn.model.learned_facts:
                continue
            prn.pending_seen.add(key)
            prn.pending.append((fact, sigma))

    def _refine_policy(self, prn: PRN):
        path = self._pick_path(prn)
        if path is None:
            return
        if self.rng.random() < self.explore_prob:
            if self._explore(prn, path):
                self.log("explore", prn.id, path[0].id)
                path = self._pick_path(prn)
                if path is None:
                    return
        leaf, _, steps = path
        phase_start = self.clock.now()
        used = 0
        state = prn.cstate[steps[0][0].id] if steps else prn.cstate[prn.tree.root.id]
        for i, (node, action, idx, _) in enumerate(steps):
            st = prn.edge_state(node.id)
            if st["status"] == "failed":
                return
            if st["status"] == "unrefined":
                if used >= self.phase_attempts or \
                        self.clock.now() - phase_start >= self.phase_seconds:
                    self.log("phase-budget", prn.id, leaf.id)
                    return
                result = concretize_action(
                    state, action, self.rng,
                    budget=self.phase_attempts - used,
                    count_attempt=self.clock.attempt)
                used += result.attempts
                if not result.ok:
                    st["attempts"] += 1
                    if st["attempts"] >= self.edge_attempts or result.exhausted:
                        st["status"] = "failed"
                    self._note_failure(prn, result.reasons, steps, i)
                    self.log("edge-failed", prn.id, leaf.id)
                    return
                st["status"] = "refined"
                st["binding"] = result.binding
                self.log("edge-refined", prn.id, leaf.id)
            binding = st["binding"]
            child = steps[i + 1][0] if i + 1 < len(steps) else leaf
            if child.id in prn.cstate:
                state = prn.cstate[child.id]
            else:
                try:
                    state = apply_outcome(
                        state, action.abstract.schema, binding, idx)
                except PreconditionViolated as exc:
                    st["status"] = "failed"
                    self._note_failure(
                        prn,
                        _violation_facts(state, exc.literal, action, binding),
                        steps, i)
                    self.log("edge-failed", prn.id, leaf.id)
                    return
                prn.cstate[child.id] = state
        # Every edge concrete: the branch is covered if the leaf really
        # satisfies the concrete goal.
        facts = []
        for lit in self.concrete.goal:
            ok, witnesses = holds_with_witnesses(state, lit)
            if not ok:
                facts.extend(_failure_facts(lit, witnesses, {}))
        if facts:
            prn.edge_state(leaf.id)["status"] = "failed"
            self._note_failure(prn, facts, steps, len(steps))
            self.log("goal-failed", prn.id, leaf.id)
            return
        prn.goal_ok.add(leaf.id)
        self._maybe_snapshot(prn)
        self.log("path-refined", prn.id, leaf.id)

    def _explore(self, prn: PRN, path) -> bool:
        """Swap the policy below the first unrefined node for a random
        applicable action; its old subtree and refinement state are
        discarded."""
        leaf, _, steps = path
        target = None
        for node, _, _, _ in steps:
            if prn.edge.get(node.id, {"status": "unrefined"})["status"] == "unrefined":
                target = node
                break
        if target is None:
            return False
        acts = sorted(prn.model.applicable(target.state), key=lambda a: a.key)
        alts = [a for a in acts if target.action is None or a.key != target.action.key]
        if not alts:
            return False
        action = self.rng.choice(alts)
        try:
            edges = []
            for prob, idx, succ in prn.model.successors(target.state, action):
                steps_left = target.steps - 1
                if prn.model.is_goal(succ) or steps_left == 0:
                    leaf_node = PolicyNode(
                        0, succ, steps_left, goal=prn.model.is_goal(succ))
                    sub = PolicyTree(leaf_node, [leaf_node])
                else:
                    rebased = _Rebased(prn.model, succ)
                    self.clock.charge(SOLVE_TICK)
                    solution = self.solver(rebased, steps_left)
                    sub = unroll_policy(rebased, solution)
                edges.append((prob, idx, sub))
        except (NoProperPolicy, StateSpaceTooLarge):
            return False
        dropped = set()
        stack = [child for _, _, child in target.edges]
        while stack:
            n = stack.pop()
            dropped.add(n.id)
            stack.extend(child for _, _, child in n.edges)
        target.action = action
        target.edges = []
        for prob, idx, sub in edges:
            for n in sub.nodes:
                n.id = prn._next_id
                prn._next_id += 1
            target.edges.append((prob, idx, sub.root))
        for nid in dropped:
            prn.edge.pop(nid, None)
            prn.cstate.pop(nid, None)
            prn.goal_ok.discard(nid)
        prn.edge.pop(target.id, None)
        # Rebuild the node list so ids and traversal order stay canonical.
        nodes, queue = [], [prn.tree.root]
        while queue:
            n = queue.pop(0)
            nodes.append(n)
            queue.extend(child for _, _, child in n.edges)
        prn.tree.nodes = nodes
        prn.recompute_covered()
        return True

    def _refine_abstraction(self, prn: PRN):
        spawned = False
        while prn.pending:
            fact, sigma = prn.pending.pop(0)
            if self._spawn_child(prn, fact, sigma) is not None:
                spawned = True
        if not spawned:
            # Nothing new learned: fall back to policy refinement so the
            # phase is never wasted.
            self._refine_policy(prn)

    def _spawn_child(self, prn: PRN, fact, sigma):
        key = str(fact)
        if key in prn.children:
            return None
        child = self._new_prn(prn.model.with_fact(fact), prn, fact, sigma)
        prn.children[key] = child
        ok = self._rebase(prn, child)
        if not ok:
            child.dead = True
        else:
            child.recompute_covered()
        self.prg.edges.append(
            PRGEdge(prn.id, child.id, fact, sigma, unsolvable=not ok))
        self.log("child-unsolvable" if not ok else "child", prn.id, child.id)
        return child

    def _rebase(self, parent: PRN, child: PRN) -> bool:
        """Carry the parent's policy over to the child's model.

        Nodes whose action stays applicable are replayed with their
        refinement marks, bindings, and concrete states intact; a subtree
        whose action the new fact blocks is discarded and re-solved from
        its own state with whatever horizon is still available at that
        depth.  Returns False when the carried-over tree has no goal mass
        left at all."""
        model = child.model
        counter = itertools.count()
        edge, cstate, goal_ok = {}, {}, set()

        def renumber(node):
            node.id = next(counter)
            for _, _, sub in node.edges:
                renumber(sub)
            return node

        def resolve(state, depth: int):
            cap = model.horizon - depth
            if cap < 1:
                return None
            self.clock.charge(SOLVE_TICK)
            try:
                _, sub = solve_with_dynamic_horizon(
                    _Rebased(model, state), solver=self.solver,
                    h_max=cap, target_mass=self.stop_mass,
                    max_tree_nodes=self.max_tree_nodes)
            except (NoProperPolicy, StateSpaceTooLarge):
                return None
            return renumber(sub.root)

        def build(old, state, depth: int):
            nid = next(counter)
            goal = model.is_goal(state)
            if old.action is None or goal:
                node = PolicyNode(nid, state, old.steps, goal=goal)
                if old.id in parent.cstate:
                    cstate[nid] = parent.cstate[old.id]
                    if old.id in parent.goal_ok:
                        goal_ok.add(nid)
                return node
            if not old.action.applicable(state):
                sub = resolve(state, depth)
                if sub is not None:
                    return sub
                return PolicyNode(nid, state, old.steps)
            node = PolicyNode(nid, state, old.steps, action=old.action)
            st = parent.edge.get(old.id)
            if st is not None:
                edge[nid] = dict(st)
            if old.id in parent.cstate:
                cstate[nid] = parent.cstate[old.id]
            successors = {idx: c for _, idx, c in old.edges}
            for prob, idx, succ in model.successors(state, old.action):
                node.edges.append(
                    (prob, idx, build(successors[idx], succ, depth + 1)))
            return node

        root = build(parent.tree.root, model.initial_state(), 0)
        nodes, queue = [], [root]
        while queue:
            n = queue.pop(0)
            nodes.append(n)
            queue.extend(c for _, _, c in n.edges)
        tree = PolicyTree(root, nodes)
        if len(nodes) > self.max_tree_nodes or tree.goal_mass() == 0:
            return False
        child.tree = tree
        child.edge = edge
        child.cstate = cstate
        child.cstate.setdefault(root.id, child._concrete_initial)
        child.goal_ok = goal_ok
        child._next_id = max(n.id for n in nodes) + 1
        return True

    # -- main loop ----------------------------------------------------

    def run(self) -> HPlanResult:
        root = self._new_prn(AbstractModel(self.concrete))
        if not self._solve(root):
            self.log("root-unsolvable", root.id)
            return self._result("root-unsolvable")
        self.log("root-solved", root.id)
        if root.tree.root.goal and self.concrete.goal_holds(self.concrete.initial):
            root.goal_ok.add(root.tree.root.id)
            self._maybe_snapshot(root)
        reason = "exhausted"
        while True:
            if self.covered >= self.stop_mass:
                reason = "mass-threshold"
                break
            if self.budget_seconds is not None and \
                    self.clock.now() >= self.budget_seconds:
                reason = "budget"
                break
            if self.iterations >= self.max_iterations:
                reason = "iteration-limit"
                break
            prn = self._select()
            if prn is None:
                reason = "exhausted"
                break
            self.iterations += 1
            refinable = bool(prn.refinable_paths())
            want_policy = self.rng.random() >= self.refine_abstraction_prob
            if want_policy and refinable:
                self._refine_policy(prn)
            elif prn.pending:
                self._refine_abstraction(prn)
            elif refinable:
                self._refine_policy(prn)
        self.log("stop:" + reason)
        return self._result(reason)

    def _result(self, reason: str) -> HPlanResult:
        return HPlanResult(
            self.best, self.covered, self.prg, self.ledger,
            self.iterations, self.clock.now(), reason)


def _violation_facts(state, literal, action, binding):
    """Facts for a precondition that failed on replay.  The ground literal
    is mapped back to its schema form so tokens land where variables were."""
    ok, witnesses = holds_with_witnesses(state, literal)
    if ok:
        return []
    schema_lit = literal
    for lit in action.abstract.schema.precondition:
        if lit.substitute(binding) == literal:
            schema_lit = lit
            break
    return _failure_facts(schema_lit, witnesses, action.tokens, binding)


def hplan(model: ConcreteModel, **kwargs) -> HPlanResult:
    return HPlan(model, **kwargs).run()
