"""Occupancy grids: world/cell transforms, PGM + YAML sidecar I/O, BFS, line of sight."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import kernels


class OutOfBoundsError(ValueError):
    pass


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    heading: float = 0.0  # degrees, counter-clockwise from +X

    def __post_init__(self):
        object.__setattr__(self, "heading", math.fmod(self.heading, 360.0) % 360.0)

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


def bearing_deg(src, dst) -> float:
    """Bearing from ``src`` to ``dst`` in [0, 360)."""
    return math.degrees(math.atan2(dst[1] - src[1], dst[0] - src[0])) % 360.0


@dataclass
class OccupancyGrid:
    """``occupied[row, col]``; row 0 is the lowest y. ``origin`` is the world
    position of the lower-left corner of cell (0, 0)."""

    occupied: np.ndarray
    resolution: float = 0.1
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        self.occupied = np.ascontiguousarray(self.occupied, dtype=bool)
        if self.occupied.ndim != 2:
            raise ValueError("occupancy grid must be 2-D")
        if not self.resolution > 0:
            raise ValueError(f"resolution must be positive, got {self.resolution}")
        self._occ_u8 = self.occupied.view(np.uint8)

    @classmethod
    def empty(cls, width: int, height: int, resolution: float = 0.1, origin=(0.0, 0.0)):
        return cls(np.zeros((height, width), dtype=bool), resolution, tuple(origin))

    @property
    def height(self) -> int:
        return self.occupied.shape[0]

    @property
    def width(self) -> int:
        return self.occupied.shape[1]

    def to_cell(self, x: float, y: float) -> tuple[int, int]:
        """(row, col) of the cell containing world point (x, y)."""
        col = math.floor((x - self.origin[0]) / self.resolution)
        row = math.floor((y - self.origin[1]) / self.resolution)
        return row, col

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (self.origin[0] + (col + 0.5) * self.resolution,
                self.origin[1] + (row + 0.5) * self.resolution)

    def in_bounds(self, x: float, y: float) -> bool:
        r, c = self.to_cell(x, y)
        return 0 <= r < self.height and 0 <= c < self.width

    def checked_cell(self, x: float, y: float) -> tuple[int, int]:
        r, c = self.to_cell(x, y)
        if not (0 <= r < self.height and 0 <= c < self.width):
            raise OutOfBoundsError(f"point ({x:.3f}, {y:.3f}) outside grid")
        return r, c

    def is_free(self, x: float, y: float) -> bool:
        r, c = self.checked_cell(x, y)
        return not self.occupied[r, c]

    def distances_from(self, x: float, y: float) -> np.ndarray:
        """BFS step counts from the cell containing (x, y); -1 where unreachable."""
        r, c = self.checked_cell(x, y)
        return kernels.bfs_distances(self._occ_u8, r, c)

    def path(self, start, goal) -> list[tuple[int, int]] | None:
        """Shortest 8-connected cell path (row, col) from start to goal, or None."""
        dist = self.distances_from(*start)
        gr, gc = self.checked_cell(*goal)
        if dist[gr, gc] < 0:
            return None
        cells = [(gr, gc)]
        r, c = gr, gc
        while dist[r, c] > 0:
            d = dist[r, c]
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)):
                rr, cc = r + dr, c + dc
                if not (0 <= rr < self.height and 0 <= cc < self.width) or dist[rr, cc] != d - 1:
                    continue
                if dr and dc and (self.occupied[r + dr, c] or self.occupied[r, c + dc]):
                    continue
                r, c = rr, cc
                break
            cells.append((r, c))
        return cells[::-1]

    def line_of_sight(self, a, b) -> bool:
        """True when no occupied cell touches the segment between the centres of a's and b's cells."""
        ra, ca = self.checked_cell(*a)
        rb, cb = self.checked_cell(*b)
        return not kernels.segment_blocked(self._occ_u8, ca + 0.5, ra + 0.5, cb + 0.5, rb + 0.5)

    # ---------------------------------------------------------------- I/O
    def save(self, pgm_path) -> Path:
        """Write a binary PGM (0 occupied, 255 free; top image row = highest y) and a YAML sidecar."""
        pgm_path = Path(pgm_path)
        img = np.where(self.occupied, 0, 255).astype(np.uint8)[::-1]
        header = f"P5\n{self.width} {self.height}\n255\n".encode()
        pgm_path.write_bytes(header + img.tobytes())
        side = pgm_path.with_suffix(".yaml")
        side.write_text(yaml.safe_dump(dict(image=pgm_path.name, resolution=float(self.resolution),
                                            origin=[float(self.origin[0]), float(self.origin[1])]),
                                       sort_keys=False))
        return side

    @classmethod
    def load(cls, path) -> "OccupancyGrid":
        """Load from a PGM (its ``.yaml`` sidecar is read if present) or from the sidecar itself."""
        path = Path(path)
        meta = {}
        if path.suffix in (".yaml", ".yml"):
            meta = yaml.safe_load(path.read_text()) or {}
            pgm = path.parent / meta.get("image", path.with_suffix(".pgm").name)
        else:
            pgm = path
            side = path.with_suffix(".yaml")
            if side.exists():
                meta = yaml.safe_load(side.read_text()) or {}
        pixels = read_pgm(pgm)
        origin = meta.get("origin", [0.0, 0.0])
        return cls(pixels[::-1] < 128, float(meta.get("resolution", 0.1)),
                   (float(origin[0]), float(origin[1])))


def read_pgm(path) -> np.ndarray:
    """Read a P2 (ASCII) or P5 (binary, 8-bit) PGM into a uint8/uint16 array."""
    raw = Path(path).read_bytes()
    tokens = []
    pos = 0
    # header: magic, width, height, maxval, with '#' comments allowed
    while len(tokens) < 4:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(raw):
            raise ValueError(f"{path}: truncated PGM header")
        if raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos])
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic == b"P5":
        dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
        data = np.frombuffer(raw, dtype=dtype, count=w * h, offset=pos + 1)
    elif magic == b"P2":
        data = np.array(raw[pos:].split()[:w * h], dtype=np.int64)
        if data.size != w * h:
            raise ValueError(f"{path}: expected {w * h} pixels, found {data.size}")
    else:
        raise ValueError(f"{path}: not a PGM file (magic {magic!r})")
    data = data.reshape(h, w)
    if maxval != 255:
        data = (data.astype(np.float64) * 255.0 / maxval).round()
    return data.astype(np.uint8)
