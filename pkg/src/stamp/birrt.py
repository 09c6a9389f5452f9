"""Sampling-based motion planning: bidirectional RRT with shortcut smoothing.

Planning is deterministic for a fixed scene and seeded random stream.  The
step size defaults to 5% of the smallest workspace extent; segment collision
checks sample at half the step size.
"""

from __future__ import annotations

import math

from .errors import NoPlanFound, OutOfBounds, StartOrGoalInCollision
from .geometry import GeometricScene, Trajectory, contacts

GOAL_BIAS = 0.05
STEP_FRACTION = 0.05
DEFAULT_BUDGET = 5000
SHORTCUT_ATTEMPTS = 200


def default_step(scene: GeometricScene) -> float:
    return STEP_FRACTION * scene.cspace.smallest_extent()


def _segment_free(scene, a, b, resolution) -> bool:
    d = math.dist(a, b)
    steps = max(1, math.ceil(d / resolution))
    for k in range(steps + 1):
        t = k / steps
        q = tuple(ai + t * (bi - ai) for ai, bi in zip(a, b))
        if contacts(scene, q):
            return False
    return True


def _steer(a, b, step):
    d = math.dist(a, b)
    if d <= step:
        return b
    t = step / d
    return tuple(ai + t * (bi - ai) for ai, bi in zip(a, b))


def _nearest(nodes, q):
    best, best_d = 0, math.dist(nodes[0], q)
    for i in range(1, len(nodes)):
        d = math.dist(nodes[i], q)
        if d < best_d:
            best, best_d = i, d
    return best


def _extend(scene, nodes, parents, q_target, step, resolution):
    """Grow the tree one step toward q_target.  Returns the new node index
    or None if blocked."""
    i = _nearest(nodes, q_target)
    q_new = _steer(nodes[i], q_target, step)
    if q_new == nodes[i]:
        return None
    if not scene.cspace.contains(q_new):
        return None
    if not _segment_free(scene, nodes[i], q_new, resolution):
        return None
    nodes.append(q_new)
    parents.append(i)
    return len(nodes) - 1


def _path_to_root(nodes, parents, i):
    path = []
    while i is not None:
        path.append(nodes[i])
        i = parents[i]
    return path


def _shortcut(scene, path, rng, resolution, attempts=SHORTCUT_ATTEMPTS):
    """Greedy smoothing: repeatedly try to replace a random sub-path with a
    straight segment."""
    path = list(path)
    for _ in range(attempts):
        if len(path) <= 2:
            break
        i = rng.randrange(0, len(path) - 1)
        j = rng.randrange(0, len(path) - 1)
        if i > j:
            i, j = j, i
        if j - i < 2:
            continue
        if _segment_free(scene, path[i], path[j], resolution):
            path = path[: i + 1] + path[j:]
    return path


def _respace(path, step):
    """Insert intermediate waypoints so consecutive ones are at most one
    step apart."""
    out = [path[0]]
    for a, b in zip(path, path[1:]):
        d = math.dist(a, b)
        if d > step:
            n = math.ceil(d / step)
            for k in range(1, n):
                t = k / n
                out.append(tuple(ai + t * (bi - ai) for ai, bi in zip(a, b)))
        out.append(b)
    return out


def plan_motion(scene: GeometricScene, start, goal, rng, *,
                step: float | None = None,
                budget: int = DEFAULT_BUDGET,
                shortcut_attempts: int = SHORTCUT_ATTEMPTS) -> Trajectory:
    """Plan a collision-free trajectory from start to goal.

    Raises OutOfBounds, StartOrGoalInCollision (carrying the touched entity
    names), or NoPlanFound once the iteration budget is spent.
    """
    start = tuple(float(v) for v in start)
    goal = tuple(float(v) for v in goal)
    if not scene.cspace.contains(start) or not scene.cspace.contains(goal):
        raise OutOfBounds("start or goal outside the workspace")
    start_hits = contacts(scene, start)
    if start_hits:
        raise StartOrGoalInCollision("start", start_hits)
    goal_hits = contacts(scene, goal)
    if goal_hits:
        raise StartOrGoalInCollision("goal", goal_hits)

    if step is None:
        step = default_step(scene)
    resolution = step / 2.0

    if math.dist(start, goal) <= step or _segment_free(scene, start, goal, resolution):
        path = _respace([start, goal], step)
        return Trajectory(tuple(path))

    # Tree A roots at the start, tree B at the goal; roles swap each round.
    nodes_a, parents_a = [start], [None]
    nodes_b, parents_b = [goal], [None]
    a_is_start = True

    for _ in range(budget):
        if rng.random() < GOAL_BIAS:
            q_rand = nodes_b[0]
        else:
            q_rand = scene.cspace.sample(rng)
        new_i = _extend(scene, nodes_a, parents_a, q_rand, step, resolution)
        if new_i is not None:
            q_new = nodes_a[new_i]
            # Greedily connect tree B toward the new node.
            j = _nearest(nodes_b, q_new)
            while True:
                nxt = _extend(scene, nodes_b, parents_b, q_new, step, resolution)
                if nxt is None:
                    break
                j = nxt
                if math.dist(nodes_b[j], q_new) <= resolution:
                    path_a = _path_to_root(nodes_a, parents_a, new_i)[::-1]
                    path_b = _path_to_root(nodes_b, parents_b, j)
                    path = path_a + path_b
                    if not a_is_start:
                        path = path[::-1]
                    path = _shortcut(scene, path, rng, resolution, shortcut_attempts)
                    path = _respace(path, step)
                    return Trajectory(tuple(path))
        nodes_a, nodes_b = nodes_b, nodes_a
        parents_a, parents_b = parents_b, parents_a
        a_is_start = not a_is_start

    raise NoPlanFound(f"no path found within {budget} iterations")
