"""Collision primitives against separating-axis, shapely, and dense-sampling
oracles."""

import math
import random

import pytest
from shapely.geometry import Point as ShapelyPoint, Polygon as ShapelyPolygon

from stamp.errors import OutOfBounds
from stamp.geometry import (
    ConfigSpace,
    GeometricScene,
    Trajectory,
    WorldModel,
    collision_free,
    contacts,
    convex_overlap,
    point_in_polygon,
    polygon,
    polygon_area,
    swept_collisions,
    transform,
    trajectory_collision_free,
)
from stamp.birrt import default_step

from oracles import (
    dense_swept_union,
    dense_trajectory_free,
    random_convex_polygon,
    sat_overlap,
)

SQUARE = polygon([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)])


def simple_scene():
    cspace = ConfigSpace(((0.0, 10.0), (0.0, 10.0)))
    obstacles = {"wall": polygon([(4.0, 4.0), (6.0, 4.0), (6.0, 6.0),
                                  (4.0, 6.0)])}
    movables = {"box": polygon([(8.0, 8.0), (9.0, 8.0), (9.0, 9.0),
                                (8.0, 9.0)])}
    return GeometricScene(cspace, SQUARE, obstacles, movables)


# --- point / polygon primitives ------------------------------------------------

def test_robot_far_from_all_obstacles_is_free():
    assert collision_free(simple_scene(), (1.0, 1.0))


def test_robot_centered_inside_obstacle_collides():
    scene = simple_scene()
    assert not collision_free(scene, (5.0, 5.0))
    assert contacts(scene, (5.0, 5.0)) == ("wall",)


def test_boundary_contact_counts_as_collision():
    # robot half-width 0.5 exactly touching the wall's left edge at x=4
    assert not collision_free(simple_scene(), (3.5, 5.0))


def test_out_of_bounds_configuration_is_rejected():
    with pytest.raises(OutOfBounds):
        collision_free(simple_scene(), (11.0, 5.0))


def test_convex_overlap_matches_sat_and_shapely_on_500_random_pairs():
    rng = random.Random(11)
    for _ in range(500):
        a = random_convex_polygon(rng, (rng.uniform(0, 4), rng.uniform(0, 4)),
                                  rng.uniform(0.3, 1.5))
        b = random_convex_polygon(rng, (rng.uniform(0, 4), rng.uniform(0, 4)),
                                  rng.uniform(0.3, 1.5))
        got = convex_overlap(a, b)
        assert got == sat_overlap(a, b)
        # shapely: boundary contact must also count, hence intersects
        sa, sb = ShapelyPolygon(a), ShapelyPolygon(b)
        if abs(sa.distance(sb)) > 1e-7:  # clear of the eps-tangency band
            assert got == sa.intersects(sb)


def test_collision_free_agrees_with_sat_oracle_on_500_configs():
    scene = simple_scene()
    rng = random.Random(5)
    polys = dict(scene.entities())
    for _ in range(500):
        q = (rng.uniform(0, 10), rng.uniform(0, 10))
        footprint = scene.robot_at(q)
        expected = not any(sat_overlap(footprint, poly)
                           for poly in polys.values())
        assert collision_free(scene, q) == expected


def test_point_in_polygon_matches_shapely():
    rng = random.Random(3)
    poly = random_convex_polygon(rng, (2.0, 2.0), 1.5)
    sp = ShapelyPolygon(poly)
    for _ in range(300):
        pt = (rng.uniform(0, 4), rng.uniform(0, 4))
        if sp.exterior.distance(ShapelyPoint(pt)) < 1e-7:
            continue  # skip the boundary band where conventions differ
        assert point_in_polygon(pt, poly) == sp.contains(ShapelyPoint(pt))


def test_transform_translates_and_rotates():
    moved = transform(SQUARE, (2.0, 3.0))
    assert moved[0] == pytest.approx((1.5, 2.5))
    quarter = transform(SQUARE, (0.0, 0.0, math.pi / 2))
    assert polygon_area(quarter) == pytest.approx(polygon_area(SQUARE))


# --- trajectories -----------------------------------------------------------------

def test_zero_length_trajectory_at_free_config_is_free():
    scene = simple_scene()
    traj = Trajectory(((1.0, 1.0), (1.0, 1.0)))
    resolution = default_step(scene) / 2
    assert trajectory_collision_free(scene, traj, resolution)


def test_straight_segment_through_obstacle_collides():
    scene = simple_scene()
    traj = Trajectory(((1.0, 5.0), (9.0, 5.0)))  # crosses the wall
    resolution = default_step(scene) / 2
    assert not trajectory_collision_free(scene, traj, resolution)
    assert "wall" in swept_collisions(scene, traj, resolution)


def test_trajectory_through_empty_space_sweeps_nothing():
    scene = simple_scene()
    traj = Trajectory(((0.7, 0.7), (0.7, 9.3), (2.0, 9.3)))
    resolution = default_step(scene) / 2
    assert swept_collisions(scene, traj, resolution) == ()


def test_trajectory_check_agrees_with_10x_finer_sampling():
    """200 fuzzed trajectories: verdicts match a 10x denser reference, except
    in the rare case where only the finer sweep clips a corner — the finer
    verdict must then be the colliding one (sampling is one-sided)."""
    scene = simple_scene()
    rng = random.Random(17)
    resolution = default_step(scene) / 2
    disagreements = 0
    for _ in range(200):
        pts = tuple(
            (rng.uniform(0.6, 9.4), rng.uniform(0.6, 9.4))
            for _ in range(rng.randint(2, 4))
        )
        traj = Trajectory(pts)
        coarse = trajectory_collision_free(scene, traj, resolution)
        fine = dense_trajectory_free(scene, traj, resolution / 10)
        if coarse != fine:
            disagreements += 1
            assert coarse and not fine
    assert disagreements <= 4


def test_swept_collisions_match_dense_union():
    scene = simple_scene()
    rng = random.Random(23)
    resolution = default_step(scene) / 2
    for _ in range(60):
        pts = tuple(
            (rng.uniform(0.6, 9.4), rng.uniform(0.6, 9.4))
            for _ in range(rng.randint(2, 3))
        )
        traj = Trajectory(pts)
        got = frozenset(swept_collisions(scene, traj, resolution))
        dense = dense_swept_union(scene, traj, resolution / 10)
        assert got <= dense  # same convention, coarser sampling


def test_swept_collisions_at_own_resolution_equal_sample_union():
    scene = simple_scene()
    resolution = default_step(scene) / 2
    traj = Trajectory(((1.0, 5.0), (9.0, 5.0), (8.5, 8.5)))
    assert frozenset(swept_collisions(scene, traj, resolution)) == \
        dense_swept_union(scene, traj, resolution)


# --- scene invariances ------------------------------------------------------------

def test_collision_free_is_translation_invariant():
    rng = random.Random(29)
    base = simple_scene()
    for _ in range(50):
        dx, dy = rng.uniform(-2, 2), rng.uniform(-2, 2)
        q = (rng.uniform(1, 9), rng.uniform(1, 9))
        shifted = GeometricScene(
            ConfigSpace(((-5.0, 15.0), (-5.0, 15.0))),
            base.robot,
            {n: tuple((x + dx, y + dy) for x, y in p)
             for n, p in base.obstacles.items()},
            {n: tuple((x + dx, y + dy) for x, y in p)
             for n, p in base.movables.items()},
        )
        wide = GeometricScene(ConfigSpace(((-5.0, 15.0), (-5.0, 15.0))),
                              base.robot, base.obstacles, base.movables)
        assert collision_free(wide, q) == \
            collision_free(shifted, (q[0] + dx, q[1] + dy))


def test_without_removes_movable_from_queries():
    scene = simple_scene()
    assert not collision_free(scene, (8.5, 8.5))
    assert collision_free(scene.without({"box"}), (8.5, 8.5))


# --- world model serialization ------------------------------------------------------

def test_world_model_json_round_trip(tmp_path):
    world = WorldModel(
        bounds=((0.0, 10.0), (0.0, 10.0)),
        robot=SQUARE,
        obstacles={"wall": polygon([(4, 4), (6, 4), (6, 6), (4, 6)])},
        movables={"box": SQUARE},
        regions={"zone": polygon([(0, 0), (2, 0), (2, 2), (0, 2)])},
        params={"reach": 0.8},
    )
    again = WorldModel.from_json(world.to_json())
    assert again.to_json() == world.to_json()
    path = tmp_path / "scene.world"
    world.save(path)
    assert WorldModel.load(path).to_json() == world.to_json()
