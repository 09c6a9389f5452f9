"""Monte-Carlo validation of refined policies against the concrete model.

A snapshot claims that every goal branch whose nodes all carry concrete
bindings can be executed as-is.  ``rollout_verify`` replays the policy
from the initial state many times, sampling outcomes with the model's
probabilities, and checks that along covered branches every precondition
holds and every goal leaf really satisfies the goal.  Reaching a branch
the snapshot never refined is not a violation; the rollout just stops
there and is counted as uncovered.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from types import SimpleNamespace

from .errors import PolicyModelMismatch, PreconditionViolated
from .model import ConcreteModel, apply_outcome, value_from_json
from .solver import PolicyNode, PolicyTree


@dataclass
class RolloutReport:
    rollouts: int = 0
    goal_reached: int = 0
    uncovered: int = 0
    dead_ends: int = 0
    violations: int = 0
    messages: list = field(default_factory=list)

    def note_violation(self, message: str):
        self.violations += 1
        if len(self.messages) < 10:
            self.messages.append(message)

    @property
    def ok(self) -> bool:
        return self.violations == 0


def load_policy(data: dict, actions: dict):
    """Rebuild a replayable snapshot from a policy-JSON dict.

    ``actions`` maps schema names to ActionSchemas from the same model the
    policy was planned against.  Returns an object with the ``tree``,
    ``bindings``, ``goal_ok``, and ``covered`` fields ``rollout_verify``
    expects, or None when the policy is empty."""
    if data.get("root") is None:
        return None
    nodes, bindings = {}, {}
    for entry in data["nodes"]:
        name = entry.get("action")
        action = None
        if name is not None:
            schema = actions.get(name)
            if schema is None:
                raise PolicyModelMismatch(
                    f"policy uses action {name!r}, which the model lacks")
            action = SimpleNamespace(
                name=name, binding=dict(entry.get("binding", {})),
                abstract=SimpleNamespace(schema=schema))
        nodes[entry["id"]] = PolicyNode(
            entry["id"], None, entry["steps"], action=action,
            goal=entry["goal"])
        if "refined" in entry:
            bindings[entry["id"]] = {
                p: value_from_json(v) for p, v in entry["refined"].items()
            }
    for entry in data["nodes"]:
        if "edges" not in entry:
            continue
        node = nodes[entry["id"]]
        for e in entry["edges"]:
            child = nodes.get(e["child"])
            if child is None:
                raise PolicyModelMismatch(
                    f"policy node {entry['id']} references missing child "
                    f"{e['child']}")
            node.edges.append((Fraction(e["prob"]), e["outcome"], child))
    root = nodes.get(data["root"])
    if root is None:
        raise PolicyModelMismatch(f"policy root {data['root']} missing")
    return SimpleNamespace(
        tree=PolicyTree(root, list(nodes.values())),
        bindings=bindings,
        goal_ok=set(data.get("verified_leaves", ())),
        covered=Fraction(data.get("covered_mass", "0")),
    )


def _sample_outcome(rng, action_schema) -> int:
    r = rng.random()
    acc = 0.0
    for i, (prob, _) in enumerate(action_schema.outcomes):
        acc += float(prob)
        if r < acc:
            return i
    return len(action_schema.outcomes) - 1


def rollout_verify(model: ConcreteModel, snapshot, *,
                   rollouts: int = 10_000, seed: int = 0) -> RolloutReport:
    """Replay ``snapshot`` against ``model``; see the module docstring."""
    rng = random.Random(seed)
    report = RolloutReport()
    tree = snapshot.tree
    bindings = snapshot.bindings
    claimed = snapshot.goal_ok
    for _ in range(rollouts):
        report.rollouts += 1
        node = tree.root
        state = model.initial
        while True:
            if node.goal:
                if node.id not in claimed:
                    report.uncovered += 1
                elif model.goal_holds(state):
                    report.goal_reached += 1
                else:
                    report.note_violation(
                        f"node {node.id}: branch claimed covered but the "
                        f"goal does not hold concretely")
                break
            if node.action is None or node.leaf:
                report.dead_ends += 1
                break
            binding = bindings.get(node.id)
            if binding is None:
                report.uncovered += 1
                break
            schema = node.action.abstract.schema
            idx = _sample_outcome(rng, schema)
            try:
                state = apply_outcome(state, schema, binding, idx)
            except PreconditionViolated as exc:
                report.note_violation(
                    f"node {node.id} ({node.action.name}): {exc}")
                break
            child = next(
                (c for _, i, c in node.edges if i == idx), None)
            if child is None:
                report.note_violation(
                    f"node {node.id}: outcome {idx} of {node.action.name} "
                    f"missing from the policy tree")
                break
            node = child
    return report
