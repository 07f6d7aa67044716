"""Body orientation from 3-D joints, 8-way orientation classes, and angle arithmetic.

Conventions: world frame is Z-up, bearings are degrees counter-clockwise from
+X viewed from above. An orientation of 0 deg means the body faces the
observer; it increases as the body turns counter-clockwise.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

N_CLASSES = 8
SECTOR_DEG = 360.0 / N_CLASSES


class DegeneratePoseError(ValueError):
    """Joints are collinear or the body-forward vector is vertical."""


@dataclass(frozen=True)
class JointTriple:
    neck: tuple[float, float, float]
    right_upper_leg: tuple[float, float, float]
    left_upper_leg: tuple[float, float, float]

    def as_array(self) -> np.ndarray:
        return np.array([self.neck, self.right_upper_leg, self.left_upper_leg], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "JointTriple":
        a = np.asarray(a, dtype=np.float64).reshape(3, 3)
        return cls(*(tuple(float(v) for v in row) for row in a))

    def rotated(self, degrees: float) -> "JointTriple":
        """Rotate all three joints about the world Z axis through the origin."""
        t = math.radians(degrees)
        rot = np.array([[math.cos(t), -math.sin(t), 0.0],
                        [math.sin(t), math.cos(t), 0.0],
                        [0.0, 0.0, 1.0]])
        return JointTriple.from_array(self.as_array() @ rot.T)


def wrap_degrees(a: float) -> float:
    """Wrap into [0, 360)."""
    w = math.fmod(a, 360.0)
    if w < 0.0:
        w += 360.0
    # fmod of a tiny negative number can round up to exactly 360
    return 0.0 if w >= 360.0 else w


def body_forward(j: JointTriple) -> np.ndarray:
    """(neck -> right upper leg) x (neck -> left upper leg); points the way the body faces."""
    neck = np.asarray(j.neck, dtype=np.float64)
    to_right = np.asarray(j.right_upper_leg, dtype=np.float64) - neck
    to_left = np.asarray(j.left_upper_leg, dtype=np.float64) - neck
    return np.cross(to_right, to_left)


def body_orientation_from_joints(j: JointTriple, observer_bearing: float = 0.0) -> float:
    """Orientation angle of the body relative to an observer, in [0, 360).

    ``observer_bearing`` is the bearing from the person toward the observer.
    """
    fwd = body_forward(j)
    scale = max(float(np.abs(j.as_array()).max()), 1.0)
    if np.linalg.norm(fwd) <= 1e-12 * scale * scale:
        raise DegeneratePoseError("joints are collinear")
    if math.hypot(fwd[0], fwd[1]) <= 1e-12 * scale * scale:
        raise DegeneratePoseError("body-forward vector is vertical; no XY projection")
    bearing = math.degrees(math.atan2(fwd[1], fwd[0]))
    return wrap_degrees(bearing - observer_bearing)


def angle_to_class(a: float) -> int:
    """Sector index; sectors are 45 deg wide and centred on multiples of 45 deg.

    Exact boundaries (k*45 + 22.5) go to the next class.
    """
    return int(math.floor(wrap_degrees(a) / SECTOR_DEG + 0.5)) % N_CLASSES


def class_to_angle(c: int) -> float:
    if not 0 <= c < N_CLASSES:
        raise ValueError(f"class index {c} outside 0..{N_CLASSES - 1}")
    return c * SECTOR_DEG


def angular_difference(a: float, b: float) -> float:
    """Shortest angular distance on the circle, in [0, 180]."""
    d = math.fmod(abs(a - b), 360.0)
    return min(d, 360.0 - d)


def read_joint_csv(path) -> list[tuple[str, JointTriple, float]]:
    """Read ``frameId, neck xyz, rHip xyz, lHip xyz, observerBearingDeg`` rows.

    The first line is a header and is skipped. Returns (frame_id, joints, bearing).
    """
    rows = []
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not f.strip() for f in rec):
                continue
            if len(rec) != 11:
                raise ValueError(f"{path}:{lineno}: expected 11 fields, got {len(rec)}")
            vals = [float(f) for f in rec[1:]]
            joints = JointTriple(tuple(vals[0:3]), tuple(vals[3:6]), tuple(vals[6:9]))
            rows.append((rec[0].strip(), joints, vals[9]))
    return rows


def label_joint_csv(path) -> list[tuple[str, float, int]]:
    """Import a joint CSV and return (frame_id, angle, class) for every row."""
    out = []
    for frame, joints, bearing in read_joint_csv(path):
        angle = body_orientation_from_joints(joints, bearing)
        out.append((frame, angle, angle_to_class(angle)))
    return out
