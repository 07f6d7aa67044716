"""Deterministic grid-world replay of the follow / dwell / reposition / face-check loop.

The robot pursues the person along BFS grid paths at a capped speed. Once the
person has stood still for ``dwell_threshold`` seconds the robot estimates
the person's orientation, scores candidate positions with the planner, drives
to the winner and checks whether a face would be visible from there.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import planner
from .grid import OccupancyGrid, Pose2D, bearing_deg
from .labels import angular_difference

GROUND_TRUTH = "ground_truth"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class FaceCone:
    half_angle: float = 22.5
    min_range: float = 0.5
    max_range: float = 3.0

    def __post_init__(self):
        if not 0.0 < self.half_angle < 90.0:
            raise ScenarioError(f"face cone half-angle must be in (0, 90), got {self.half_angle}")


@dataclass
class Scenario:
    grid: OccupancyGrid
    robot_start: Pose2D
    trajectory: list[tuple[float, Pose2D]]
    dwell_threshold: float = 2.5
    orientation_source: str = GROUND_TRUTH   # or a model file path
    face_cone: FaceCone = field(default_factory=FaceCone)
    seed: int = 0
    dt: float = 0.1
    duration: float | None = None
    robot_speed: float = 0.5
    follow_distance: float = 1.0
    bearings: int = 16
    literal_obstacle: bool = False

    def __post_init__(self):
        if not self.trajectory:
            raise ScenarioError("target trajectory is empty")
        times = [t for t, _ in self.trajectory]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ScenarioError("trajectory times must be strictly increasing")
        if self.dt <= 0:
            raise ScenarioError("dt must be positive")
        if not self.grid.in_bounds(*self.robot_start.xy) or not self.grid.is_free(*self.robot_start.xy):
            raise ScenarioError("robot starts outside the map or on an occupied cell")

    @property
    def end_time(self) -> float:
        return self.duration if self.duration is not None else self.trajectory[-1][0] + 20.0

    def target_at(self, t: float) -> Pose2D:
        """Piecewise-linear position; heading taken from the segment's start waypoint, then the end."""
        traj = self.trajectory
        if t <= traj[0][0]:
            return traj[0][1]
        for (t0, p0), (t1, p1) in zip(traj, traj[1:]):
            if t0 <= t < t1:
                a = (t - t0) / (t1 - t0)
                return Pose2D(p0.x + a * (p1.x - p0.x), p0.y + a * (p1.y - p0.y), p0.heading)
        return traj[-1][1]

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path | None = None) -> "Scenario":
        base_dir = Path(base_dir or ".")
        g = d.get("grid")
        if isinstance(g, dict):
            occ = np.zeros((int(g["height"]), int(g["width"])), dtype=bool)
            for r0, c0, r1, c1 in g.get("walls", []):
                occ[r0:r1 + 1, c0:c1 + 1] = True
            grid = OccupancyGrid(occ, float(g.get("resolution", 0.1)),
                                 tuple(g.get("origin", (0.0, 0.0))))
        elif isinstance(g, str):
            grid = OccupancyGrid.load(base_dir / g)
        else:
            raise ScenarioError("scenario needs a 'grid' (file path or inline mapping)")
        cone = d.get("face_cone", {}) or {}
        return cls(
            grid=grid,
            robot_start=Pose2D(*d["robot"]),
            trajectory=[(float(w[0]), Pose2D(*w[1:])) for w in d["trajectory"]],
            dwell_threshold=float(d.get("dwell_threshold", 2.5)),
            orientation_source=_resolve_source(d.get("orientation_source", GROUND_TRUTH), base_dir),
            face_cone=FaceCone(**cone),
            seed=int(d.get("seed", 0)),
            dt=float(d.get("dt", 0.1)),
            duration=None if d.get("duration") is None else float(d["duration"]),
            robot_speed=float(d.get("robot_speed", 0.5)),
            follow_distance=float(d.get("follow_distance", 1.0)),
            bearings=int(d.get("bearings", 16)),
            literal_obstacle=bool(d.get("literal_obstacle", False)),
        )

    @classmethod
    def load(cls, path) -> "Scenario":
        path = Path(path)
        return cls.from_dict(yaml.safe_load(path.read_text()), base_dir=path.parent)


def _resolve_source(src: str, base_dir: Path) -> str:
    if src == GROUND_TRUTH:
        return src
    p = Path(src)
    return str(p if p.is_absolute() else base_dir / p)


# ------------------------------------------------------------------ sensing

def face_detected(robot, target: Pose2D, grid: OccupancyGrid, cone: FaceCone = FaceCone()) -> int:
    robot = robot.xy if isinstance(robot, Pose2D) else robot
    rng = math.hypot(robot[0] - target.x, robot[1] - target.y)
    if not cone.min_range <= rng <= cone.max_range:
        return 0
    # same nano-degree snap as the planner so a candidate on the cone edge counts as inside
    if round(angular_difference(bearing_deg(target.xy, robot), target.heading), 9) > cone.half_angle:
        return 0
    return int(grid.line_of_sight(robot, target.xy))


class OrientationEstimator:
    """Ground-truth geometry or a trained model looking at a rendered view."""

    def __init__(self, source: str = GROUND_TRUTH, seed: int = 0):
        self.source = source
        self.seed = seed
        self.model = None
        self.calls = 0
        if source != GROUND_TRUTH:
            from .nnet import load_model
            try:
                self.model = load_model(source)
            except OSError as exc:
                raise ScenarioError(f"cannot read model file {source}: {exc}") from exc

    def __call__(self, robot, target: Pose2D) -> tuple[int, float]:
        """Returns (observed class in planner convention, target heading to plan with)."""
        robot = robot.xy if isinstance(robot, Pose2D) else robot
        to_robot = bearing_deg(target.xy, robot)
        self.calls += 1
        if self.model is None:
            return planner.observed_class(robot, target), target.heading
        from .data import render_figure
        from .nnet import predict
        # the image label counts the body's turn counter-clockwise from the viewer,
        # which is the mirror of the planner's observer-bearing classes
        view_angle = target.heading - to_robot
        rng = np.random.default_rng([self.seed, self.calls])
        _, label_cls = predict(self.model, render_figure(view_angle, rng))
        cls = (-label_cls) % 8
        return cls, (to_robot - 45.0 * cls) % 360.0


# --------------------------------------------------------------- simulation

@dataclass
class SimState:
    t: float
    robot: Pose2D
    target: Pose2D
    still_ticks: int = 0
    mode: str = "follow"            # follow | reposition | hold
    waypoints: list = field(default_factory=list)
    goal: planner.Candidate | None = None
    planned: bool = False           # planner already fired for this still period


def _advance(pos, waypoints, budget):
    x, y = pos
    while waypoints and budget > 0:
        wx, wy = waypoints[0]
        d = math.hypot(wx - x, wy - y)
        if d <= budget:
            x, y = wx, wy
            budget -= d
            waypoints.pop(0)
        else:
            x += (wx - x) * budget / d
            y += (wy - y) * budget / d
            budget = 0.0
    return (x, y)


def _path_waypoints(grid: OccupancyGrid, start, goal_xy, exact_goal: bool):
    cells = grid.path(start, goal_xy)
    if cells is None:
        return None
    # start with the current cell's centre so the first leg cannot clip a neighbouring cell
    pts = [grid.cell_center(r, c) for r, c in cells]
    if exact_goal:
        pts.append(tuple(goal_xy))
    return pts


class Simulator:
    def __init__(self, scenario: Scenario):
        self.sc = scenario
        self.estimator = OrientationEstimator(scenario.orientation_source, scenario.seed)
        self.trace = dict(ticks=[], plans=[])
        self.state = SimState(0.0, scenario.robot_start, scenario.target_at(0.0))
        self._record()

    def _record(self):
        s = self.state
        self.trace["ticks"].append(dict(
            t=round(s.t, 9), robot=[s.robot.x, s.robot.y, s.robot.heading],
            target=[s.target.x, s.target.y, s.target.heading],
            dwell=round(s.still_ticks * self.sc.dt, 9), mode=s.mode,
            face=face_detected(s.robot, s.target, self.sc.grid, self.sc.face_cone)))

    def step(self) -> SimState:
        sc, s, grid = self.sc, self.state, self.sc.grid
        dt = sc.dt
        tick = int(round(s.t / dt)) + 1
        t = tick * dt
        target = sc.target_at(t)
        moved = math.hypot(target.x - s.target.x, target.y - s.target.y) > grid.resolution
        still_ticks = 0 if moved else s.still_ticks + 1
        s = SimState(t, s.robot, target, still_ticks, s.mode, s.waypoints, s.goal, s.planned)
        if moved:
            s.planned = False
            s.mode = "follow"
            s.goal = None

        if not s.planned and s.still_ticks * dt >= sc.dwell_threshold - 1e-9:
            self._plan(s)

        budget = sc.robot_speed * dt
        if s.mode == "reposition":
            pos = _advance(s.robot.xy, s.waypoints, budget)
            s.robot = Pose2D(*pos, bearing_deg(pos, target.xy))
            if not s.waypoints:
                s.mode = "hold"
                rec = self.trace["plans"][-1]
                rec["reached_t"] = round(t, 9)
                rec["face_after"] = face_detected(s.robot, target, grid, sc.face_cone)
        elif s.mode == "follow":
            if math.hypot(target.x - s.robot.x, target.y - s.robot.y) > sc.follow_distance:
                wps = _path_waypoints(grid, s.robot.xy, target.xy, exact_goal=False)
                if wps:
                    pos = _advance(s.robot.xy, wps, budget)
                    s.robot = Pose2D(*pos, bearing_deg(pos, target.xy))
        self.state = s
        self._record()
        return s

    def _plan(self, s: SimState):
        sc = self.sc
        s.planned = True
        true_cls = planner.observed_class(s.robot.xy, s.target)
        est_cls, heading = self.estimator(s.robot, s.target)
        planning_target = Pose2D(s.target.x, s.target.y, heading)
        result = planner.plan(s.robot.xy, planning_target, sc.grid, sc.bearings, sc.literal_obstacle)
        rec = dict(t=round(s.t, 9), true_class=true_cls, estimated_class=est_cls,
                   planning_heading=heading,
                   face_before=face_detected(s.robot, s.target, sc.grid, sc.face_cone),
                   selected=None, breakdown=None, reached_t=None, face_after=None)
        if result.viable:
            wps = _path_waypoints(sc.grid, s.robot.xy, result.best.xy, exact_goal=True)
            rec["selected"] = dict(x=result.best.x, y=result.best.y, radius=result.best.radius,
                                   bearing=result.best.bearing)
            rec["breakdown"] = result.breakdown.to_dict()
            if wps is not None:
                s.mode = "reposition"
                s.waypoints = wps
                s.goal = result.best
        self.trace["plans"].append(rec)

    def run(self) -> dict:
        n_ticks = int(round(self.sc.end_time / self.sc.dt))
        while int(round(self.state.t / self.sc.dt)) < n_ticks:
            self.step()
        return self.trace


def run_scenario(scenario: Scenario) -> dict:
    return Simulator(scenario).run()


def trace_json(trace: dict) -> str:
    return json.dumps(trace, sort_keys=True, separators=(",", ":"))


# --------------------------------------------------------- scenario builders

def open_room(width_m: float = 8.0, height_m: float = 8.0, resolution: float = 0.1,
              boxes=()) -> OccupancyGrid:
    """Walled rectangular room; ``boxes`` are (x0, y0, x1, y1) world rectangles to fill."""
    w, h = int(round(width_m / resolution)), int(round(height_m / resolution))
    occ = np.zeros((h, w), dtype=bool)
    occ[0, :] = occ[-1, :] = occ[:, 0] = occ[:, -1] = True
    for x0, y0, x1, y1 in boxes:
        c0, c1 = int(math.floor(x0 / resolution)), int(math.ceil(x1 / resolution))
        r0, r1 = int(math.floor(y0 / resolution)), int(math.ceil(y1 / resolution))
        occ[max(r0, 0):r1, max(c0, 0):c1] = True
    return OccupancyGrid(occ, resolution, (0.0, 0.0))


def random_open_room_scenario(seed: int, orientation_source: str = GROUND_TRUTH) -> Scenario:
    """Static person in an 8 m room, facing away from the robot, with a clear frontal sector."""
    rng = np.random.default_rng(seed)
    tx, ty = rng.uniform(2.6, 5.4, size=2)
    heading = rng.uniform(0.0, 360.0)
    back = math.radians(heading + 180.0 + rng.uniform(-50.0, 50.0))
    rd = rng.uniform(1.5, 2.5)
    rx = float(np.clip(tx + rd * math.cos(back), 0.4, 7.6))
    ry = float(np.clip(ty + rd * math.sin(back), 0.4, 7.6))
    boxes = []
    for _ in range(rng.integers(0, 4)):
        bx, by = rng.uniform(0.3, 7.0, size=2)
        box = (bx, by, bx + rng.uniform(0.2, 0.6), by + rng.uniform(0.2, 0.6))
        cx, cy = (box[0] + box[2]) / 2, (box[1] + box[3]) / 2
        if math.hypot(cx - tx, cy - ty) > 2.9 and math.hypot(cx - rx, cy - ry) > 0.9:
            boxes.append(box)
    return Scenario(grid=open_room(boxes=boxes), robot_start=Pose2D(rx, ry, 0.0),
                    trajectory=[(0.0, Pose2D(float(tx), float(ty), float(heading)))],
                    orientation_source=orientation_source, seed=seed, duration=20.0)
