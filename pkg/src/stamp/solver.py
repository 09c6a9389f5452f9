"""Finite-horizon solver for stochastic shortest-path models.

Works against any model exposing ``initial_state()``, ``is_goal(s)``,
``applicable(s)`` (actions carrying ``key`` and ``cost``) and
``successors(s, a)`` yielding ``(probability, outcome_index, successor)``
triples with exact ``Fraction`` probabilities.  Values are indexed by
(state, steps remaining); a state that runs out of steps before the goal
pays a dead-end penalty large enough that any policy with positive goal
probability is preferred at benchmark branch odds.

``value_iteration`` enumerates everything reachable and is the slow exact
reference; ``lao_star`` expands only what the greedy policy visits and
matches it on that subgraph.  ``unroll_policy`` turns a solution into an
explicit contingent tree whose leaf masses sum to one exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DanglingState, NoProperPolicy, StateSpaceTooLarge
from .model import sorted_literals, value_to_json

EPSILON = 1e-6
DEFAULT_STATE_LIMIT = 200_000
DEFAULT_TREE_LIMIT = 200_000
PENALTY_FACTOR = 100.0


def state_label(state) -> str:
    """Stable one-line rendering of a state, for messages and JSON."""
    if isinstance(state, frozenset):
        return "{" + " ".join(str(l) for l in sorted_literals(state)) + "}"
    return repr(state)


def dead_end_penalty(model, horizon: int) -> float:
    """Default terminal penalty: far above any achievable path cost."""
    max_cost = 1.0
    for a in model.ground_actions():
        max_cost = max(max_cost, a.cost)
    return PENALTY_FACTOR * max_cost * max(horizon, 1)


def zero_heuristic(state) -> float:
    return 0.0


def min_cost_heuristic(model):
    """Admissible estimate: one more action is needed unless at the goal."""
    costs = [a.cost for a in model.ground_actions() if a.cost > 0]
    floor = min(costs) if costs else 0.0

    def h(state) -> float:
        return 0.0 if model.is_goal(state) else floor

    return h


@dataclass
class Solution:
    """Values and greedy policy over (state, steps-remaining) keys."""

    values: dict
    policy: dict
    horizon: int
    penalty: float
    root: tuple
    expansions: int = 0

    def value(self, state, steps: int) -> float:
        return self.values[(state, steps)]

    def greedy_keys(self, model) -> list:
        """Keys reachable from the root under the greedy policy."""
        seen, order, stack = set(), [], [self.root]
        while stack:
            key = stack.pop()
            if key in seen:
                continue
            seen.add(key)
            order.append(key)
            action = self.policy.get(key)
            if action is None:
                continue
            state, steps = key
            for _, _, succ in model.successors(state, action):
                stack.append((succ, steps - 1))
        return order


def _sorted_actions(model, state):
    return sorted(model.applicable(state), key=lambda a: a.key)


def enumerate_states(model, horizon: int, state_limit: int = DEFAULT_STATE_LIMIT):
    """All states reachable from the initial state within ``horizon`` steps,
    in deterministic discovery order."""
    s0 = model.initial_state()
    seen = {s0}
    order = [s0]
    frontier = [s0]
    for _ in range(horizon):
        nxt = []
        for s in frontier:
            if model.is_goal(s):
                continue
            for a in _sorted_actions(model, s):
                for _, _, succ in model.successors(s, a):
                    if succ not in seen:
                        seen.add(succ)
                        order.append(succ)
                        nxt.append(succ)
                        if len(seen) > state_limit:
                            raise StateSpaceTooLarge(state_limit)
        frontier = nxt
        if not frontier:
            break
    return order


def value_iteration(model, horizon: int | None = None, *,
                    penalty: float | None = None,
                    state_limit: int = DEFAULT_STATE_LIMIT) -> Solution:
    """Exact backward induction over the full reachable state space."""
    if horizon is None:
        horizon = model.horizon
    if penalty is None:
        penalty = dead_end_penalty(model, horizon)
    order = enumerate_states(model, horizon, state_limit)
    goals = {s for s in order if model.is_goal(s)}
    succs = {
        s: [
            (a, float(a.cost),
             [(float(p), s2) for p, _, s2 in model.successors(s, a)])
            for a in _sorted_actions(model, s)
        ]
        for s in order if s not in goals
    }
    values: dict = {}
    policy: dict = {}
    for t in range(horizon + 1):
        for s in order:
            key = (s, t)
            if s in goals:
                values[key] = 0.0
                policy[key] = None
                continue
            if t == 0 or not succs[s]:
                values[key] = penalty
                policy[key] = None
                continue
            best_q, best_a = None, None
            for a, cost_f, pairs in succs[s]:
                q = cost_f
                for p_f, s2 in pairs:
                    q += p_f * values[(s2, t - 1)]
                if best_q is None or q < best_q - 1e-12:
                    best_q, best_a = q, a
            values[key] = best_q
            policy[key] = best_a
    return Solution(values, policy, horizon, penalty, (order[0], horizon))


def lao_star(model, horizon: int | None = None, *,
             penalty: float | None = None,
             heuristic=None,
             state_limit: int = DEFAULT_STATE_LIMIT) -> Solution:
    """Heuristic-guided solver that only expands states the greedy policy
    can reach.  With an admissible heuristic its values agree with
    ``value_iteration`` on the greedy subgraph."""
    if horizon is None:
        horizon = model.horizon
    if penalty is None:
        penalty = dead_end_penalty(model, horizon)
    h = heuristic if heuristic is not None else zero_heuristic

    s0 = model.initial_state()
    root = (s0, horizon)
    values: dict = {}
    policy: dict = {}
    expanded: dict = {}
    discovered: list = []

    def discover(key):
        if key in values:
            return
        state, steps = key
        if model.is_goal(state):
            values[key] = 0.0
            policy[key] = None
        elif steps == 0:
            values[key] = penalty
            policy[key] = None
        else:
            values[key] = h(state)
        discovered.append(key)

    def terminal(key) -> bool:
        state, steps = key
        return steps == 0 or model.is_goal(state)

    discover(root)
    expansions = 0
    while True:
        # Tips: unexpanded, non-terminal nodes of the current greedy graph.
        tips, seen, stack = [], set(), [root]
        while stack:
            key = stack.pop()
            if key in seen:
                continue
            seen.add(key)
            if terminal(key):
                continue
            if key not in expanded:
                tips.append(key)
                continue
            best = policy.get(key)
            if best is None:
                continue
            state, steps = key
            for _, succ in expanded[key][1].get(best.key, ()):
                stack.append((succ, steps - 1))
        if not tips:
            break
        for key in tips:
            state, steps = key
            entries = [
                (a, float(a.cost),
                 [(float(p), s2) for p, _, s2 in model.successors(state, a)])
                for a in _sorted_actions(model, state)
            ]
            children = {a.key: pairs for a, _, pairs in entries}
            expanded[key] = (entries, children)
            expansions += 1
            for _, _, pairs in entries:
                for _, succ in pairs:
                    discover((succ, steps - 1))
            if len(values) > state_limit:
                raise StateSpaceTooLarge(state_limit)
        # One sweep in increasing steps-remaining order is exact on a DAG.
        for key in sorted(expanded, key=lambda k: k[1]):
            state, steps = key
            entries, _ = expanded[key]
            if not entries:
                values[key] = penalty
                policy[key] = None
                continue
            best_q, best_a = None, None
            for a, cost_f, pairs in entries:
                q = cost_f
                for p_f, s2 in pairs:
                    q += p_f * values[(s2, steps - 1)]
                if best_q is None or q < best_q - 1e-12:
                    best_q, best_a = q, a
            values[key] = best_q
            policy[key] = best_a
    return Solution(values, policy, horizon, penalty, root, expansions)


# --- contingent policy trees ----------------------------------------------

@dataclass
class PolicyNode:
    id: int
    state: object
    steps: int
    action: object = None
    goal: bool = False
    edges: list = field(default_factory=list)  # (Fraction, outcome_index, node)

    @property
    def leaf(self) -> bool:
        return not self.edges


@dataclass
class PolicyTree:
    root: PolicyNode
    nodes: list

    def leaf_masses(self):
        """(leaf node, exact path probability) pairs; masses sum to one."""
        out = []

        def walk(node, mass: Fraction):
            if node.leaf:
                out.append((node, mass))
                return
            for prob, _, child in node.edges:
                walk(child, mass * prob)

        walk(self.root, Fraction(1))
        return out

    def goal_mass(self) -> Fraction:
        return sum((m for n, m in self.leaf_masses() if n.goal), Fraction(0))

    def total_mass(self) -> Fraction:
        return sum((m for _, m in self.leaf_masses()), Fraction(0))

    def paths(self):
        """Root-to-leaf paths as (leaf, probability, steps) with each step a
        (node, action, outcome_index, probability) tuple."""
        out = []

        def walk(node, mass: Fraction, prefix):
            if node.leaf:
                out.append((node, mass, tuple(prefix)))
                return
            for prob, idx, child in node.edges:
                prefix.append((node, node.action, idx, prob))
                walk(child, mass * prob, prefix)
                prefix.pop()

        walk(self.root, Fraction(1), [])
        return out

    def to_json(self, bindings: dict | None = None) -> dict:
        nodes = []
        for n in self.nodes:
            entry = {
                "id": n.id,
                "steps": n.steps,
                "goal": n.goal,
                "state": [str(l) for l in sorted_literals(n.state)]
                if isinstance(n.state, frozenset) else repr(n.state),
            }
            if n.action is not None:
                entry["action"] = n.action.name
                entry["binding"] = {
                    p: v for p, v in sorted(n.action.binding.items())
                }
                entry["edges"] = [
                    {"prob": str(prob), "outcome": idx, "child": child.id}
                    for prob, idx, child in n.edges
                ]
            if bindings and n.id in bindings:
                entry["refined"] = {
                    p: value_to_json(v) for p, v in sorted(bindings[n.id].items())
                }
            nodes.append(entry)
        return {"root": self.root.id, "nodes": nodes}

    def dumps(self, bindings: dict | None = None) -> str:
        return json.dumps(self.to_json(bindings), indent=2, sort_keys=True)


def unroll_policy(model, solution: Solution, *,
                  max_nodes: int = DEFAULT_TREE_LIMIT) -> PolicyTree:
    """Expand a solution into the explicit contingent tree it induces.

    Goal states close a branch; a non-terminal key the policy does not
    cover raises DanglingState.  A state whose value has absorbed the
    dead-end penalty cannot reach the goal any more, so the branch ends
    there as a dead leaf rather than unrolling filler actions.
    """
    state0, steps0 = solution.root
    root = PolicyNode(0, state0, steps0)
    nodes = [root]
    queue = [root]
    while queue:
        node = queue.pop(0)
        if model.is_goal(node.state):
            node.goal = True
            continue
        if node.steps == 0:
            continue
        key = (node.state, node.steps)
        if key not in solution.policy:
            raise DanglingState(state_label(node.state))
        if solution.values[key] >= solution.penalty - 1e-9:
            continue
        action = solution.policy[key]
        if action is None:
            continue
        node.action = action
        for prob, idx, succ in model.successors(node.state, action):
            child = PolicyNode(len(nodes), succ, node.steps - 1)
            nodes.append(child)
            node.edges.append((prob, idx, child))
            queue.append(child)
            if len(nodes) > max_nodes:
                raise StateSpaceTooLarge(max_nodes)
    return PolicyTree(root, nodes)


def goal_depth(model, h_max: int, state_limit: int = DEFAULT_STATE_LIMIT):
    """Length of the shortest action sequence from the initial state to any
    goal state, ignoring probabilities, or ``None`` if no goal is reachable
    within ``h_max`` steps (or before ``state_limit`` states are seen).

    No policy can place goal mass below this depth, so it is a sound lower
    bound for the horizon search."""
    state = model.initial_state()
    if model.is_goal(state):
        return 0
    seen = {state}
    frontier = [state]
    for depth in range(1, h_max + 1):
        nxt = []
        for s in frontier:
            for action in model.applicable(s):
                for _, _, s2 in model.successors(s, action):
                    if s2 in seen:
                        continue
                    if model.is_goal(s2):
                        return depth
                    seen.add(s2)
                    if len(seen) > state_limit:
                        return depth
                    nxt.append(s2)
        if not nxt:
            return None
        frontier = nxt
    return None


def solve_with_dynamic_horizon(model, *, h_start: int = 1,
                               h_max: int | None = None,
                               solver=lao_star,
                               target_mass=None,
                               max_tree_nodes: int = DEFAULT_TREE_LIMIT,
                               **solver_kwargs):
    """Solve at the smallest horizon whose greedy policy has positive goal
    probability; raises NoProperPolicy when none up to ``h_max`` does.

    With ``target_mass`` set, keeps growing the horizon past the first
    proper policy until the unrolled tree's goal mass reaches the target,
    the policy tree would exceed ``max_tree_nodes``, or ``h_max`` is hit,
    and returns the best-mass solution seen."""
    if h_max is None:
        h_max = min(model.horizon, 50)
    depth = goal_depth(model, h_max)
    if depth is None:
        raise NoProperPolicy(
            f"no goal state is reachable within horizon {h_max}")
    best = None
    for h in range(max(h_start, depth), h_max + 1):
        try:
            solution = solver(model, h, **solver_kwargs)
            tree = unroll_policy(model, solution, max_nodes=max_tree_nodes)
        except StateSpaceTooLarge:
            break
        mass = tree.goal_mass()
        if mass > 0 and (best is None or mass > best[0]):
            best = (mass, solution, tree)
        if best is not None and (target_mass is None or best[0] >= target_mass):
            break
    if best is not None:
        return best[1], best[2]
    raise NoProperPolicy(
        f"no policy reaches the goal within horizon {h_max}")
