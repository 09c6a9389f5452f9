"""Planar geometry: convex polygons, scenes, configurations, trajectories.

All polygons are convex and stored as tuples of (x, y) vertices in
counter-clockwise order.  Collision checks use the separating-axis test;
boundary contact counts as a collision.  Workspaces are axis-aligned boxes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import OutOfBounds, ParseError

EPS = 1e-9

Point = tuple[float, float]
Polygon = tuple[Point, ...]


def polygon(points) -> Polygon:
    return tuple((float(x), float(y)) for x, y in points)


def polygon_area(poly: Polygon) -> float:
    s = 0.0
    for (x1, y1), (x2, y2) in zip(poly, poly[1:] + poly[:1]):
        s += x1 * y2 - x2 * y1
    return abs(s) / 2.0


def polygon_centroid(poly: Polygon) -> Point:
    xs = sum(p[0] for p in poly) / len(poly)
    ys = sum(p[1] for p in poly) / len(poly)
    return (xs, ys)


def transform(poly: Polygon, pose) -> Polygon:
    """Place a local-frame polygon at pose (x, y) or (x, y, theta)."""
    x, y = pose[0], pose[1]
    if len(pose) > 2 and pose[2]:
        c, s = math.cos(pose[2]), math.sin(pose[2])
        return tuple((x + c * px - s * py, y + s * px + c * py) for px, py in poly)
    return tuple((x + px, y + py) for px, py in poly)


def _axes(poly: Polygon):
    for (x1, y1), (x2, y2) in zip(poly, poly[1:] + poly[:1]):
        ex, ey = x2 - x1, y2 - y1
        norm = math.hypot(ex, ey)
        if norm > EPS:
            yield (-ey / norm, ex / norm)


def _project(poly: Polygon, axis) -> tuple[float, float]:
    dots = [axis[0] * x + axis[1] * y for x, y in poly]
    return min(dots), max(dots)


def convex_overlap(a: Polygon, b: Polygon) -> bool:
    """Separating-axis overlap test for convex polygons.  Touching counts."""
    for axis in _axes(a):
        lo_a, hi_a = _project(a, axis)
        lo_b, hi_b = _project(b, axis)
        if hi_a < lo_b - EPS or hi_b < lo_a - EPS:
            return False
    for axis in _axes(b):
        lo_a, hi_a = _project(a, axis)
        lo_b, hi_b = _project(b, axis)
        if hi_a < lo_b - EPS or hi_b < lo_a - EPS:
            return False
    return True


def point_in_polygon(pt, poly: Polygon) -> bool:
    """Point containment in a convex CCW polygon, boundary inclusive."""
    px, py = pt[0], pt[1]
    for (x1, y1), (x2, y2) in zip(poly, poly[1:] + poly[:1]):
        if (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1) < -EPS:
            return False
    return True


@dataclass(frozen=True)
class ConfigSpace:
    """Axis-aligned box of robot configurations, 2 or 3 dimensions."""

    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not 2 <= len(self.bounds) <= 3:
            raise ValueError("configuration space must have 2 or 3 dimensions")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ValueError("each bound must satisfy lo < hi")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def contains(self, q) -> bool:
        return len(q) == self.dim and all(
            lo - EPS <= v <= hi + EPS for v, (lo, hi) in zip(q, self.bounds)
        )

    def sample(self, rng):
        return tuple(rng.uniform(lo, hi) for lo, hi in self.bounds)

    def smallest_extent(self) -> float:
        return min(hi - lo for lo, hi in self.bounds)


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear path through configuration space."""

    waypoints: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("a trajectory needs at least two waypoints")

    @property
    def start(self):
        return self.waypoints[0]

    @property
    def end(self):
        return self.waypoints[-1]

    def length(self) -> float:
        return sum(
            math.dist(a, b) for a, b in zip(self.waypoints, self.waypoints[1:])
        )

    def sample(self, spacing: float):
        """Yield configurations along the path no more than ``spacing`` apart,
        always including segment endpoints."""
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            yield a
            d = math.dist(a, b)
            if d > spacing:
                steps = math.ceil(d / spacing)
                for k in range(1, steps):
                    t = k / steps
                    yield tuple(ai + t * (bi - ai) for ai, bi in zip(a, b))
        yield self.waypoints[-1]


@dataclass(frozen=True)
class GeometricScene:
    """Static obstacles plus movable entities at known poses.

    ``robot`` is the robot footprint in its local frame; a configuration's
    first two components translate it (a third rotates it).  ``obstacles``
    and ``movables`` map entity names to world-frame polygons.
    """

    cspace: ConfigSpace
    robot: Polygon
    obstacles: dict[str, Polygon] = field(default_factory=dict)
    movables: dict[str, Polygon] = field(default_factory=dict)
    regions: dict[str, Polygon] = field(default_factory=dict)

    def robot_at(self, q) -> Polygon:
        return transform(self.robot, q)

    def entities(self):
        yield from sorted(self.obstacles.items())
        yield from sorted(self.movables.items())

    def without(self, names) -> "GeometricScene":
        """Scene with the named movables removed (e.g. a held object)."""
        keep = {n: p for n, p in self.movables.items() if n not in names}
        return GeometricScene(self.cspace, self.robot, self.obstacles, keep, self.regions)

    def static_only(self) -> "GeometricScene":
        return GeometricScene(self.cspace, self.robot, self.obstacles, {}, self.regions)


def contacts(scene: GeometricScene, q) -> tuple[str, ...]:
    """Names of entities the robot footprint overlaps at configuration q."""
    if not scene.cspace.contains(q):
        raise OutOfBounds(f"configuration {q} outside workspace")
    footprint = scene.robot_at(q)
    return tuple(
        name for name, poly in scene.entities() if convex_overlap(footprint, poly)
    )


def collision_free(scene: GeometricScene, q) -> bool:
    return not contacts(scene, q)


def placement_contacts(scene: GeometricScene, poly_local: Polygon, pose,
                       ignore=()) -> tuple[str, ...]:
    """Entities overlapping a polygon placed at ``pose`` (for placement checks)."""
    placed = transform(poly_local, pose)
    return tuple(
        name
        for name, poly in scene.entities()
        if name not in ignore and convex_overlap(placed, poly)
    )


def trajectory_collision_free(scene: GeometricScene, traj: Trajectory,
                              resolution: float) -> bool:
    return all(not contacts(scene, q) for q in traj.sample(resolution))


def swept_collisions(scene: GeometricScene, traj: Trajectory,
                     resolution: float) -> tuple[str, ...]:
    """Sorted names of entities the robot touches anywhere along the path."""
    hit: set[str] = set()
    for q in traj.sample(resolution):
        hit.update(contacts(scene, q))
    return tuple(sorted(hit))


class WorldModel:
    """Static description loaded from a ``.world`` file.

    Movable polygons are stored in their local frame; the scene builder
    places each at the pose supplied by the task state.
    """

    def __init__(self, bounds, robot, obstacles=None, movables=None,
                 regions=None, params=None):
        self.cspace = ConfigSpace(tuple((float(lo), float(hi)) for lo, hi in bounds))
        self.robot = polygon(robot)
        self.obstacles = {n: polygon(p) for n, p in (obstacles or {}).items()}
        self.movables = {n: polygon(p) for n, p in (movables or {}).items()}
        self.regions = {n: polygon(p) for n, p in (regions or {}).items()}
        self.params = dict(params or {})

    def scene(self, placements: dict[str, tuple], include=None) -> GeometricScene:
        """Build a scene placing each movable named in ``placements``.

        Movables without a placement are absent (held or not yet in play).
        """
        movables = {}
        for name, pose in placements.items():
            if name not in self.movables:
                continue
            if include is not None and name not in include:
                continue
            movables[name] = transform(self.movables[name], pose)
        return GeometricScene(self.cspace, self.robot, dict(self.obstacles),
                              movables, dict(self.regions))

    def to_json(self) -> dict:
        return {
            "bounds": [list(b) for b in self.cspace.bounds],
            "robot": [list(p) for p in self.robot],
            "obstacles": [
                {"name": n, "vertices": [list(p) for p in poly]}
                for n, poly in sorted(self.obstacles.items())
            ],
            "movables": [
                {"name": n, "vertices": [list(p) for p in poly]}
                for n, poly in sorted(self.movables.items())
            ],
            "regions": [
                {"name": n, "vertices": [list(p) for p in poly]}
                for n, poly in sorted(self.regions.items())
            ],
            "params": dict(sorted(self.params.items())),
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, data: dict) -> "WorldModel":
        try:
            return cls(
                bounds=data["bounds"],
                robot=data["robot"],
                obstacles={e["name"]: e["vertices"] for e in data.get("obstacles", [])},
                movables={e["name"]: e["vertices"] for e in data.get("movables", [])},
                regions={e["name"]: e["vertices"] for e in data.get("regions", [])},
                params=data.get("params", {}),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed world file: {exc}")

    @classmethod
    def load(cls, path) -> "WorldModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def sample_in_polygon(poly: Polygon, rng, max_tries: int = 1000):
    """Uniform sample inside a convex polygon by rejection from its bbox."""
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    for _ in range(max_tries):
        pt = (rng.uniform(min(xs), max(xs)), rng.uniform(min(ys), max(ys)))
        if point_in_polygon(pt, poly):
            return pt
    raise OutOfBounds("rejection sampling failed for degenerate region")
