import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orientbot import planner
from orientbot.grid import OccupancyGrid, OutOfBoundsError, Pose2D
from orientbot.planner import Candidate

from .planner_oracles import (ORIENTATION_TABLE, RADIUS_TABLE, bfs_oracle, brute_force_select,
                              los_dense_sampling, los_oracle)


def open_grid(width_m=10.0, res=0.1, origin=(-5.0, -5.0)):
    n = int(round(width_m / res))
    return OccupancyGrid.empty(n, n, res, origin)


def test_candidate_generation():
    cands = planner.generate_candidates(Pose2D(0, 0, 0), 16)
    assert len(cands) == 64
    first_r1 = next(c for c in cands if c.radius == 1.0 and c.bearing == 0)
    assert (first_r1.x, first_r1.y) == (1.0, 0.0)
    for c in cands:
        assert abs(math.hypot(c.x, c.y) - c.radius) < 0.05
    with pytest.raises(ValueError):
        planner.generate_candidates(Pose2D(0, 0, 0), 3)


@pytest.mark.parametrize("p,cls", [((2, 0), 0), ((-2, 0), 4),
                                   ((math.cos(math.radians(100)), math.sin(math.radians(100))), 2)])
def test_observed_class(p, cls):
    assert planner.observed_class(p, Pose2D(0, 0, 0)) == cls


def test_observed_class_rejects_coincident():
    with pytest.raises(ValueError):
        planner.observed_class((1, 1), Pose2D(1, 1, 30))


def test_multiplier_tables():
    assert [planner.orientation_multiplier(c) for c in range(8)] == ORIENTATION_TABLE
    assert planner.orientation_multiplier(0) == 10.0
    assert planner.orientation_multiplier(4) == 0.001
    assert planner.orientation_multiplier(7) == 1.0
    for r, m in RADIUS_TABLE.items():
        assert planner.radius_multiplier(r) == m
    with pytest.raises(ValueError):
        planner.radius_multiplier(0.75)


def test_distance_score():
    eps = 0.1
    assert planner.distance_score((3, 0), (0, 0), [(3, 0)], eps) == eps
    cands = [(1, 0), (3, 0)]
    assert planner.distance_score((1, 0), (0, 0), cands, eps) == pytest.approx(2 + eps)
    assert planner.distance_score((3, 0), (0, 0), cands, eps) == pytest.approx(eps)
    with pytest.raises(ValueError):
        planner.distance_score((1, 0), (0, 0), [], eps)


def test_distance_ordering_reverses_robot_distance():
    rng = np.random.default_rng(0)
    pts = [tuple(p) for p in rng.uniform(-4, 4, size=(20, 2))]
    s = [planner.distance_score(p, (0, 0), pts, 0.1) for p in pts]
    d = [math.hypot(*p) for p in pts]
    assert np.argsort(s, kind="stable").tolist() == np.argsort(-np.array(d), kind="stable").tolist()
    assert min(s) > 0


def test_occupancy_term():
    g = open_grid()
    assert planner.occupancy_term((1, 1), (-2, -2), g) == 1
    g.occupied[g.to_cell(1, 1)] = True
    assert planner.occupancy_term((1, 1), (-2, -2), g) == 0
    with pytest.raises(OutOfBoundsError):
        planner.occupancy_term((9, 9), (0, 0), g)


def test_occupancy_wall_ring():
    g = open_grid()
    r, c = g.to_cell(2.05, 2.05)
    g.occupied[r - 2:r + 3, c - 2:c + 3] = True
    g.occupied[r - 1:r + 2, c - 1:c + 2] = False
    assert planner.occupancy_term((2.05, 2.05), (-2, -2), g) == 0
    assert bfs_oracle(g.occupied, g.to_cell(-2, -2))[r, c] == -1


def test_obstacle_term():
    g = open_grid()
    assert planner.obstacle_term((-3.05, 0.05), (3.05, 0.05), g) == 1
    g.occupied[g.to_cell(0.05, 0.05)] = True
    assert planner.obstacle_term((-3.05, 0.05), (3.05, 0.05), g) == 0
    assert planner.obstacle_term((-3.05, 0.05), (3.05, 0.05), g, literal=True) == 1


def test_obstacle_grazing_corner():
    # diagonal segment through the shared corner of two diagonally placed occupied cells
    occ = np.zeros((6, 6), dtype=bool)
    occ[2, 3] = occ[3, 2] = True
    g = OccupancyGrid(occ, 1.0)
    assert not los_dense_sampling(occ, (0, 0), (5, 5))
    assert not los_oracle(occ, (0, 0), (5, 5))
    assert planner.obstacle_term((0.5, 0.5), (5.5, 5.5), g) == 0
    # the other diagonal never touches them
    occ2 = np.zeros((6, 6), dtype=bool)
    occ2[2, 2] = True
    assert los_dense_sampling(occ2, (0, 5), (1, 4))
    assert planner.obstacle_term((5.5, 0.5), (4.5, 1.5), OccupancyGrid(occ2, 1.0)) == 1


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_line_of_sight_matches_exact_oracle(seed):
    rng = np.random.default_rng(seed)
    occ = rng.random((15, 15)) < 0.15
    a = tuple(int(v) for v in rng.integers(0, 15, 2))
    b = tuple(int(v) for v in rng.integers(0, 15, 2))
    g = OccupancyGrid(occ, 0.5)
    pa, pb = g.cell_center(*a), g.cell_center(*b)
    assert g.line_of_sight(pa, pb) == los_oracle(occ, a, b)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_bfs_matches_networkx(seed):
    rng = np.random.default_rng(seed)
    occ = rng.random((12, 14)) < 0.3
    start = (int(rng.integers(0, 12)), int(rng.integers(0, 14)))
    g = OccupancyGrid(occ, 1.0)
    got = g.distances_from(start[1] + 0.5, start[0] + 0.5)
    assert np.array_equal(got, bfs_oracle(occ, start))


def test_path_is_valid():
    occ = np.zeros((10, 10), dtype=bool)
    occ[2:9, 5] = True
    g = OccupancyGrid(occ, 1.0)
    path = g.path((1.5, 4.5), (8.5, 4.5))
    assert path[0] == (4, 1) and path[-1] == (4, 8)
    assert len(path) - 1 == bfs_oracle(occ, (4, 1))[4, 8]
    for (r0, c0), (r1, c1) in zip(path, path[1:]):
        assert max(abs(r1 - r0), abs(c1 - c0)) == 1 and not occ[r1, c1]
    occ[:, 5] = True
    assert OccupancyGrid(occ, 1.0).path((1.5, 4.5), (8.5, 4.5)) is None


def test_utility_product_and_zero():
    g = open_grid()
    target = Pose2D(0, 0, 0)
    cands = planner.generate_candidates(target)
    for c, bd in planner.score_all(cands, (-3, 0.3), target, g):
        assert bd.total == bd.orientation * bd.distance * bd.radius * bd.occupancy * bd.obstacle
        assert bd.occupancy in (0, 1) and bd.obstacle in (0, 1)
    c0 = cands[16]
    g.occupied[g.to_cell(c0.x, c0.y)] = True
    assert planner.utility(c0, (-3, 0.3), target, g, cands).total == 0


def test_class_ratio_is_ten():
    g = open_grid()
    target = Pose2D(0, 0, 0)
    # same radius and same robot distance, observed classes 0 and 1
    a = Candidate(1.0, 0.0, 1.0, 0.0)
    b = Candidate(math.cos(math.radians(45)), math.sin(math.radians(45)), 1.0, 45.0)
    robot = (math.cos(math.radians(22.5)) * -3, math.sin(math.radians(22.5)) * -3)
    ua = planner.utility(a, robot, target, g, [a, b])
    ub = planner.utility(b, robot, target, g, [a, b])
    assert (ua.observed_class, ub.observed_class) == (0, 1)
    assert ua.total / ub.total == pytest.approx(10.0, rel=1e-9)


def test_target_facing_robot_picks_frontal_2m():
    g = open_grid()
    res = planner.plan((0, 0), Pose2D(3, 0, 180), g)
    assert res.best.radius == 2.0
    assert (res.best.x, res.best.y) == pytest.approx((1.0, 0.0), abs=1e-9)
    assert res.breakdown.observed_class == 0
    idx, _ = brute_force_select(planner.generate_candidates(Pose2D(3, 0, 180)), (0, 0),
                                Pose2D(3, 0, 180), g.occupied, g.resolution, g.origin)
    assert planner.generate_candidates(Pose2D(3, 0, 180))[idx] == res.best


def test_fixture_room_selects_frontal(fixtures_dir):
    g = OccupancyGrid.load(fixtures_dir / "empty_room.pgm")
    res = planner.plan((1.5, 4.0), Pose2D(4.0, 4.0, 0.0), g)
    # robot behind the target: the winner is in front of the target, on the facing ray
    assert res.breakdown.observed_class == 0
    assert res.best.bearing in (0.0, 337.5) and res.best.x > 4.0
    cands = planner.generate_candidates(Pose2D(4.0, 4.0, 0.0))
    idx, _ = brute_force_select(cands, (1.5, 4.0), Pose2D(4.0, 4.0, 0.0), g.occupied, g.resolution, g.origin)
    assert cands[idx] == res.best


def test_fixture_room_robot_in_front_selects_frontal_2m(fixtures_dir):
    g = OccupancyGrid.load(fixtures_dir / "empty_room.yaml")
    res = planner.plan((1.0, 4.0), Pose2D(4.0, 4.0, 180.0), g)
    assert res.best.radius == 2.0 and res.breakdown.observed_class == 0
    assert (res.best.x, res.best.y) == pytest.approx((2.0, 4.0))


def test_boundary_bearings_round_up():
    target = Pose2D(4.0, 4.0, 0.0)
    by_bearing = {c.bearing: planner.observed_class(c.xy, target)
                  for c in planner.generate_candidates(target) if c.radius == 1.0}
    assert by_bearing[22.5] == 1 and by_bearing[337.5] == 0 and by_bearing[202.5] == 5


def test_all_walled_off_is_not_viable():
    g = open_grid()
    r, c = g.to_cell(-4, -4)
    g.occupied[r - 1:r + 2, c - 1:c + 2] = True
    g.occupied[r, c] = False
    res = planner.plan((-4, -4), Pose2D(0, 0, 0), g)
    assert not res.viable and res.best is None


def _random_scene(rng):
    g = open_grid(8.0, 0.1, (0.0, 0.0))
    for _ in range(rng.integers(0, 7)):
        x0, y0 = rng.integers(0, 75, 2)
        w, h = rng.integers(1, 15, 2)
        g.occupied[y0:y0 + h, x0:x0 + w] = True
    while True:
        tx, ty = rng.uniform(1.0, 7.0, 2)
        rx, ry = rng.uniform(0.2, 7.8, 2)
        if not g.occupied[g.to_cell(rx, ry)] and math.hypot(tx - rx, ty - ry) > 0.3:
            break
    return g, (rx, ry), Pose2D(tx, ty, rng.uniform(0, 360))


def test_select_best_matches_brute_force_200():
    rng = np.random.default_rng(2024)
    viable = 0
    for _ in range(200):
        g, robot, target = _random_scene(rng)
        literal = bool(rng.random() < 0.1)
        cands = planner.generate_candidates(target, int(rng.choice([8, 12, 16])))
        res = planner.select_best(cands, robot, target, g, literal)
        idx, scores = brute_force_select(cands, robot, target, g.occupied, g.resolution, g.origin, literal)
        for (c, bd), (tot, cls) in zip(res.scored, scores):
            assert bd.observed_class == cls
            assert bd.total == pytest.approx(tot, rel=1e-12, abs=0)
        if idx is None:
            assert not res.viable
        else:
            viable += 1
            assert res.best == cands[idx]
    assert viable > 150


def test_selection_invariant_to_order_and_distance_scale():
    rng = np.random.default_rng(7)
    for _ in range(30):
        g, robot, target = _random_scene(rng)
        cands = planner.generate_candidates(target)
        best = planner.select_best(cands, robot, target, g).best
        shuffled = list(cands)
        random.Random(int(rng.integers(1 << 30))).shuffle(shuffled)
        assert planner.select_best(shuffled, robot, target, g).best == best
        scored = planner.score_all(cands, robot, target, g)
        scaled = min(scored, key=lambda cb: planner.rank_key(cb[0], cb[1].total * 3.7, cb[1].observed_class))
        if best is not None:
            assert scaled[0] == best


def test_literal_flag_flips_obstacle():
    g = open_grid()
    g.occupied[g.to_cell(1.0, 0.05)] = True
    target = Pose2D(0.05, 0.05, 0)
    lit = dict((c, bd) for c, bd in planner.score_all(planner.generate_candidates(target), (-3, 3), target, g, True))
    std = dict((c, bd) for c, bd in planner.score_all(planner.generate_candidates(target), (-3, 3), target, g))
    for c in lit:
        if g.in_bounds(c.x, c.y):
            assert lit[c].obstacle == 1 - std[c].obstacle


def test_grid_roundtrip(tmp_path):
    g = open_grid(4.0, 0.25, (-1.0, 2.0))
    g.occupied[3, 5] = g.occupied[0, 0] = True
    side = g.save(tmp_path / "m.pgm")
    for p in (tmp_path / "m.pgm", side):
        back = OccupancyGrid.load(p)
        assert np.array_equal(back.occupied, g.occupied)
        assert back.resolution == 0.25 and back.origin == (-1.0, 2.0)
    # world <-> cell round trip within half a cell
    for r, c in [(0, 0), (3, 5), (15, 15)]:
        assert g.to_cell(*g.cell_center(r, c)) == (r, c)


def test_ascii_pgm(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_text("P2\n# comment\n3 2\n255\n0 255 255\n255 255 0\n")
    g = OccupancyGrid.load(p)
    # top image row is the highest y
    assert g.occupied.tolist() == [[False, False, True], [True, False, False]]
