"""Utility-based repositioning around a person on an occupancy grid.

Each candidate position p on rings around the target t is scored by

    U(p) = Orientation(t) * Distance(p, r) * Radius(p) * Occupancy(p) * Obstacle(p, t)

and the highest-scoring candidate is chosen.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .grid import OccupancyGrid, OutOfBoundsError, Pose2D, bearing_deg
from .labels import angle_to_class

RADII = (0.5, 1.0, 1.5, 2.0)
ORIENTATION_MULTIPLIER = {0: 10.0, 1: 1.0, 7: 1.0, 2: 0.1, 6: 0.1, 3: 0.01, 5: 0.01, 4: 0.001}
RADIUS_MULTIPLIER = {0.5: 0.5, 1.0: 0.8, 1.5: 0.8, 2.0: 1.0}


@dataclass(frozen=True)
class Candidate:
    x: float
    y: float
    radius: float
    bearing: float  # degrees, world frame, from the target

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class UtilityBreakdown:
    orientation: float
    distance: float
    radius: float
    occupancy: int
    obstacle: int
    observed_class: int

    @property
    def total(self) -> float:
        return self.orientation * self.distance * self.radius * self.occupancy * self.obstacle

    def to_dict(self) -> dict:
        return dict(asdict(self), total=self.total)


def generate_candidates(target: Pose2D, bearings_per_ring: int = 16) -> list[Candidate]:
    if bearings_per_ring < 4:
        raise ValueError(f"need at least 4 bearings per ring, got {bearings_per_ring}")
    out = []
    for r in RADII:
        for k in range(bearings_per_ring):
            b = 360.0 * k / bearings_per_ring
            t = math.radians(b)
            out.append(Candidate(target.x + r * math.cos(t), target.y + r * math.sin(t), r, b))
    return out


def observed_class(p, target: Pose2D) -> int:
    """Orientation class seen from ``p``: sector of (bearing target->p) - target heading."""
    if math.isclose(p[0], target.x, abs_tol=1e-12) and math.isclose(p[1], target.y, abs_tol=1e-12):
        raise ValueError("candidate coincides with the target")
    rel = (bearing_deg(target.xy, p) - target.heading) % 360.0
    # Candidates on sector boundaries (22.5, 67.5, ...) must not flip class on atan2 rounding,
    # so snap the relative angle to a nano-degree first.
    return angle_to_class(round(rel, 9))


def orientation_multiplier(c: int) -> float:
    return ORIENTATION_MULTIPLIER[int(c) % 8]


def radius_multiplier(radius: float) -> float:
    for r, m in RADIUS_MULTIPLIER.items():
        if abs(radius - r) < 1e-9:
            return m
    raise ValueError(f"no radius multiplier for {radius} m (known: {sorted(RADIUS_MULTIPLIER)})")


def _dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def distance_score(p, robot, all_candidates, epsilon: float) -> float:
    """max_{p'} |p' - robot| - |p - robot| + epsilon: nearer candidates score higher."""
    if not all_candidates:
        raise ValueError("empty candidate set")
    far = max(_dist(c.xy if isinstance(c, Candidate) else c, robot) for c in all_candidates)
    return far - _dist(p, robot) + epsilon


def occupancy_term(p, robot, grid: OccupancyGrid, reach: np.ndarray | None = None) -> int:
    """1 if p's cell is free and connected to the robot's cell through free cells."""
    r, c = grid.checked_cell(*p)
    if reach is None:
        reach = grid.distances_from(*robot)
    else:
        grid.checked_cell(*robot)
    return int(reach[r, c] >= 0)


def obstacle_term(p, target, grid: OccupancyGrid, literal: bool = False) -> int:
    """1 when the line between p and the target is clear of occupied cells.

    ``literal=True`` flips the term (1 only when something blocks the line).
    """
    clear = grid.line_of_sight(p, target)
    return int(not clear) if literal else int(clear)


def utility(cand: Candidate, robot, target: Pose2D, grid: OccupancyGrid, all_candidates,
            reach: np.ndarray | None = None, far: float | None = None,
            literal_obstacle: bool = False) -> UtilityBreakdown:
    robot = robot.xy if isinstance(robot, Pose2D) else robot
    cls = observed_class(cand.xy, target)
    if far is None:
        dist = distance_score(cand.xy, robot, all_candidates, grid.resolution)
    else:
        dist = far - _dist(cand.xy, robot) + grid.resolution
    return UtilityBreakdown(
        orientation=orientation_multiplier(cls),
        distance=dist,
        radius=radius_multiplier(cand.radius),
        occupancy=occupancy_term(cand.xy, robot, grid, reach),
        obstacle=obstacle_term(cand.xy, target.xy, grid, literal_obstacle),
        observed_class=cls,
    )


def rank_key(cand: Candidate, total: float, cls: int):
    """Sort key: best first. Ties go to the lower class, then larger radius, then smaller bearing."""
    return (-total, cls, -cand.radius, cand.bearing)


@dataclass
class PlanResult:
    best: Candidate | None
    breakdown: UtilityBreakdown | None
    scored: list[tuple[Candidate, UtilityBreakdown]]

    @property
    def viable(self) -> bool:
        return self.best is not None

    def to_dict(self) -> dict:
        return dict(
            viable=self.viable,
            selected=None if self.best is None else dict(asdict(self.best), utility=self.breakdown.to_dict()),
            candidates=[dict(asdict(c), utility=b.to_dict()) for c, b in self.scored],
        )


def score_all(candidates, robot, target: Pose2D, grid: OccupancyGrid,
              literal_obstacle: bool = False) -> list[tuple[Candidate, UtilityBreakdown]]:
    robot = robot.xy if isinstance(robot, Pose2D) else robot
    reach = grid.distances_from(*robot)
    far = max(_dist(c.xy, robot) for c in candidates)
    out = []
    for c in candidates:
        if not grid.in_bounds(*c.xy):
            # off-map candidates cannot be reached
            cls = observed_class(c.xy, target)
            out.append((c, UtilityBreakdown(orientation_multiplier(cls),
                                            far - _dist(c.xy, robot) + grid.resolution,
                                            radius_multiplier(c.radius), 0, 0, cls)))
            continue
        out.append((c, utility(c, robot, target, grid, candidates, reach=reach, far=far,
                               literal_obstacle=literal_obstacle)))
    return out


def select_best(candidates, robot, target: Pose2D, grid: OccupancyGrid,
                literal_obstacle: bool = False) -> PlanResult:
    """Argmax of U over the candidates; ``best`` is None when every total is 0."""
    if not candidates:
        raise ValueError("no candidates")
    scored = score_all(candidates, robot, target, grid, literal_obstacle)
    cand, bd = min(scored, key=lambda cb: rank_key(cb[0], cb[1].total, cb[1].observed_class))
    if bd.total <= 0.0:
        return PlanResult(None, None, scored)
    return PlanResult(cand, bd, scored)


def plan(robot, target: Pose2D, grid: OccupancyGrid, bearings_per_ring: int = 16,
         literal_obstacle: bool = False) -> PlanResult:
    return select_best(generate_candidates(target, bearings_per_ring), robot, target, grid,
                       literal_obstacle)


__all__ = [
    "Candidate", "UtilityBreakdown", "PlanResult", "RADII", "ORIENTATION_MULTIPLIER",
    "RADIUS_MULTIPLIER", "generate_candidates", "observed_class", "orientation_multiplier",
    "radius_multiplier", "distance_score", "occupancy_term", "obstacle_term", "utility",
    "select_best", "score_all", "plan", "rank_key", "OutOfBoundsError",
]
