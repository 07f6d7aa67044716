"""Synthetic orientation images, cropping/resizing, splitting and dataset files.

The renderer draws a stylised person (legs, textured torso, arms, head with a
face on the front and hair on the back) rotated about the vertical axis and
projected orthographically onto a 32x32 RGB image, as seen by an observer on
the +X axis.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import MagicMismatchError, TruncatedFileError, VersionMismatchError
from .labels import JointTriple, angle_to_class, wrap_degrees

IMAGE_SIZE = 32
_SS = 3  # supersampling factor per axis

# body-frame joints (x forward, y left, z up), metres
NECK = (0.0, 0.0, 1.45)
RIGHT_HIP = (0.0, -0.10, 0.90)
LEFT_HIP = (0.0, 0.10, 0.90)


@dataclass(frozen=True)
class StyleParams:
    illumination: tuple[float, float] = (0.5, 1.5)
    jitter_px: float = 2.0
    scale: tuple[float, float] = (0.9, 1.05)
    arm_swing: float = 0.12        # max forward/back hand offset, metres
    noise: float = 0.01
    palette_shift: float = 0.0     # rotates clothing colours, degrees


@dataclass
class LabeledSample:
    image: np.ndarray
    label: int
    angle: float | None = None
    joints: JointTriple | None = None


@dataclass
class Dataset:
    images: np.ndarray                 # (N, 32, 32, 3) float32 in [0, 1]
    labels: np.ndarray                 # (N,) int64
    angles: np.ndarray | None = None   # (N,) degrees
    joints: np.ndarray | None = None   # (N, 3, 3): neck, right hip, left hip
    provenance: str = "synthetic"
    seed: int | None = None
    style: StyleParams | None = field(default=None, compare=False)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.images) != len(self.labels):
            raise ValueError("images and labels differ in length")
        if self.angles is not None:
            expect = np.array([angle_to_class(a) for a in self.angles], dtype=np.int64)
            if not np.array_equal(expect, self.labels):
                raise ValueError("labels disagree with the stored angles")

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, i) -> LabeledSample:
        return LabeledSample(
            image=self.images[i], label=int(self.labels[i]),
            angle=None if self.angles is None else float(self.angles[i]),
            joints=None if self.joints is None else JointTriple.from_array(self.joints[i]))

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.images[idx], self.labels[idx],
                       None if self.angles is None else self.angles[idx],
                       None if self.joints is None else self.joints[idx],
                       provenance=self.provenance, seed=self.seed, style=self.style)

    def class_histogram(self, n_classes: int = 8) -> np.ndarray:
        return np.bincount(self.labels, minlength=n_classes)

    def same_samples(self, other: "Dataset") -> bool:
        def eq(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.shape == b.shape and np.array_equal(a, b)
        return (eq(self.images, other.images) and eq(self.labels, other.labels)
                and eq(self.angles, other.angles) and eq(self.joints, other.joints))


# ------------------------------------------------------------------ render

def _rot_z(deg: float) -> np.ndarray:
    t = math.radians(deg)
    return np.array([[math.cos(t), -math.sin(t), 0.0],
                     [math.sin(t), math.cos(t), 0.0],
                     [0.0, 0.0, 1.0]])


def sample_joints(angle: float, scale: float = 1.0) -> np.ndarray:
    """Neck / right hip / left hip of a figure whose front faces ``angle`` deg (observer on +X)."""
    body = np.array([NECK, RIGHT_HIP, LEFT_HIP]) * scale
    return body @ _rot_z(angle).T


def _hue(psi, shift):
    """Smooth colour wheel over torso azimuth ``psi`` (radians)."""
    p = psi + shift
    return np.stack([0.35 + 0.25 * np.cos(p),
                     0.35 + 0.25 * np.cos(p - 2.0943951023931953),
                     0.35 + 0.25 * np.cos(p + 2.0943951023931953)], axis=-1)


def render_figure(angle: float, rng: np.random.Generator, style: StyleParams = StyleParams(),
                  scale: float | None = None) -> np.ndarray:
    """Render one 32x32x3 float image of the figure turned ``angle`` degrees from the viewer."""
    if scale is None:
        scale = rng.uniform(*style.scale)
    illum = rng.uniform(*style.illumination)
    jitter = rng.uniform(-style.jitter_px, style.jitter_px, size=2)
    background = rng.uniform(0.05, 0.6, size=3)
    swing = rng.uniform(-style.arm_swing, style.arm_swing, size=2)
    shift = math.radians(style.palette_shift)

    n = IMAGE_SIZE * _SS
    px_per_m = IMAGE_SIZE / 2.0 * scale
    cols = (np.arange(n) + 0.5) / _SS - IMAGE_SIZE / 2 - jitter[0]
    rows = (np.arange(n) + 0.5) / _SS - IMAGE_SIZE / 2 - jitter[1]
    u = cols / px_per_m                       # world y (image right)
    v = 0.9 - rows / px_per_m                 # world z (image up)
    U, V = np.meshgrid(u, v)

    c, s = math.cos(math.radians(angle)), math.sin(math.radians(angle))
    depth = np.full(U.shape, -np.inf)
    color = np.broadcast_to(background, U.shape + (3,)).copy()

    def paint(mask, d, rgb):
        hit = mask & (d > depth)
        depth[hit] = d[hit]
        color[hit] = rgb[hit] if np.ndim(rgb) == 3 else rgb

    def world(p):
        x, y, z = p
        return np.array([c * x - s * y, s * x + c * y, z])

    def capsule(p0, p1, radius, rgb):
        a, b = world(p0), world(p1)
        du, dv = b[1] - a[1], b[2] - a[2]
        L2 = du * du + dv * dv
        t = np.clip(((U - a[1]) * du + (V - a[2]) * dv) / L2, 0.0, 1.0) if L2 > 0 else 0.0 * U
        cu, cv = a[1] + t * du, a[2] + t * dv
        d2 = (U - cu) ** 2 + (V - cv) ** 2
        mask = d2 <= radius * radius
        axis_depth = a[0] + t * (b[0] - a[0])
        bulge = np.sqrt(np.maximum(radius * radius - d2, 0.0))
        shade = 0.75 + 0.25 * bulge / radius
        paint(mask, axis_depth + bulge, np.asarray(rgb)[None, None, :] * shade[..., None])

    # legs and arms; left limbs warm, right limbs cool so the sides are distinguishable
    capsule((0.0, 0.10, 0.88), (0.0, 0.11, 0.05), 0.065, (0.55, 0.30, 0.15))
    capsule((0.0, -0.10, 0.88), (0.0, -0.11, 0.05), 0.065, (0.15, 0.25, 0.50))
    capsule((0.0, 0.26, 1.40), (swing[0], 0.29, 0.95), 0.05, (0.62, 0.15, 0.15))
    capsule((0.0, -0.26, 1.40), (swing[1], -0.29, 0.95), 0.05, (0.12, 0.45, 0.55))

    # torso: elliptic cylinder, front-back semi-axis a, side semi-axis b
    a_ax, b_ax = 0.11, 0.20
    band = (V >= 0.88) & (V <= 1.45)
    # visible point along the viewing ray (x, U): body coords xb = c x + s U, yb = -s x + c U
    qa = c * c / a_ax ** 2 + s * s / b_ax ** 2
    qb = 2.0 * U * (c * s / a_ax ** 2 - s * c / b_ax ** 2)
    qc = U * U * (s * s / a_ax ** 2 + c * c / b_ax ** 2) - 1.0
    disc = qb * qb - 4.0 * qa * qc
    inside = band & (disc >= 0.0)
    xs = (-qb + np.sqrt(np.maximum(disc, 0.0))) / (2.0 * qa)
    xb = c * xs + s * U
    yb = -s * xs + c * U
    psi = np.arctan2(yb / b_ax, xb / a_ax)
    rgb = _hue(psi, shift)
    chest = (np.abs(psi) < 0.55) & (V > 1.18) & (V < 1.36)
    rgb[chest] = (0.65, 0.65, 0.55)
    nrm_x = (c * xb / a_ax ** 2 - s * yb / b_ax ** 2)
    nrm = np.hypot(xb / a_ax ** 2, yb / b_ax ** 2)
    shade = 0.7 + 0.3 * np.clip(nrm_x / np.maximum(nrm, 1e-12), 0.0, 1.0)
    paint(inside, xs, rgb * shade[..., None])

    # head: skin in front, hair behind, two eyes
    hc = np.array([0.0, 0.0, 1.60])
    hr = 0.11
    d2 = U ** 2 + (V - hc[2]) ** 2
    on_head = d2 <= hr * hr
    hx = np.sqrt(np.maximum(hr * hr - d2, 0.0))                 # world x of visible surface
    bx = c * hx + s * U                                          # body-frame x
    by = -s * hx + c * U
    bz = V - hc[2]
    skin = np.array([0.62, 0.48, 0.38])
    hair = np.array([0.18, 0.12, 0.08])
    head_rgb = np.where((bx > -0.02)[..., None] & (bz < 0.06)[..., None], skin, hair)
    for ey in (0.04, -0.04):
        eye = np.array([0.095, ey, 0.01])
        e_d2 = (bx - eye[0]) ** 2 + (by - eye[1]) ** 2 + (bz - eye[2]) ** 2
        head_rgb[e_d2 < 0.022 ** 2] = (0.05, 0.05, 0.05)
    paint(on_head, hx, head_rgb * (0.75 + 0.25 * hx / hr)[..., None])

    img = color.reshape(IMAGE_SIZE, _SS, IMAGE_SIZE, _SS, 3).mean(axis=(1, 3)) * illum
    if style.noise > 0:
        img = img + rng.normal(0.0, style.noise, img.shape)
    return np.clip(img, 0.0, 1.0).astype(np.float32)


def sample_angle(index: int, rng: np.random.Generator) -> float:
    """Uniform angle inside the sector of class ``index % 8`` (class-balanced stratification)."""
    cls = index % 8
    return wrap_degrees(cls * 45.0 - 22.5 + 45.0 * rng.random())


def generate_sample(index: int, seed: int, style: StyleParams = StyleParams()):
    """One (image, label, angle, joints) record; depends only on (seed, index, style)."""
    rng = np.random.default_rng(seed ^ index)
    angle = sample_angle(index, rng)
    scale = rng.uniform(*style.scale)
    image = render_figure(angle, rng, style, scale=scale)
    return image, angle_to_class(angle), angle, sample_joints(angle, scale)


def generate_synthetic(n: int, seed: int = 0, style: StyleParams = StyleParams(),
                       workers: int = 1) -> Dataset:
    """Render ``n`` labelled samples; output is identical for any ``workers`` count."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            recs = list(ex.map(generate_sample, range(n), [seed] * n, [style] * n, chunksize=64))
    else:
        recs = [generate_sample(i, seed, style) for i in range(n)]
    return Dataset(
        images=np.stack([r[0] for r in recs]),
        labels=np.array([r[1] for r in recs], dtype=np.int64),
        angles=np.array([r[2] for r in recs], dtype=np.float64),
        joints=np.stack([r[3] for r in recs]),
        provenance="synthetic", seed=seed, style=style)


# --------------------------------------------------------- crop and resize

def crop_and_resize(image, box, size: int = IMAGE_SIZE) -> np.ndarray:
    """Bilinear resample of ``box = (x0, y0, x1, y1)`` (pixel edges) to size x size.

    Output pixel centres map to box coordinates with the half-pixel
    convention; samples are clamped to the box interior pixels.
    """
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape[:2]
    x0, y0, x1, y1 = (float(b) for b in box)
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"degenerate box {box}")
    if x0 < 0 or y0 < 0 or x1 > w or y1 > h:
        raise ValueError(f"box {box} outside image of size {w}x{h}")

    def axis(lo, hi, n_src):
        pos = lo + (np.arange(size) + 0.5) * (hi - lo) / size - 0.5
        first, last = max(math.ceil(lo - 0.5), 0), min(math.floor(hi - 0.5), n_src - 1)
        if last < first:
            first = last = min(max(int(math.floor(lo)), 0), n_src - 1)
        pos = np.clip(pos, first, last)
        i0 = np.floor(pos).astype(int)
        i1 = np.minimum(i0 + 1, last)
        return i0, i1, pos - i0

    r0, r1, fy = axis(y0, y1, h)
    c0, c1, fx = axis(x0, x1, w)
    top = image[r0][:, c0] * (1 - fx)[None, :, None] + image[r0][:, c1] * fx[None, :, None]
    bot = image[r1][:, c0] * (1 - fx)[None, :, None] + image[r1][:, c1] * fx[None, :, None]
    out = top * (1 - fy)[:, None, None] + bot * fy[:, None, None]
    return np.clip(out, 0.0, 1.0)


# ------------------------------------------------------------------- split

def split(dataset: Dataset, val_fraction: float, seed: int = 0) -> tuple[Dataset, Dataset]:
    if not 0.0 < val_fraction < 1.0:
        raise ValueError(f"val_fraction must be in (0, 1), got {val_fraction}")
    n = len(dataset)
    n_val = min(max(int(round(n * val_fraction)), 1), n - 1) if n > 1 else 0
    perm = np.random.default_rng(seed).permutation(n)
    return dataset.subset(np.sort(perm[n_val:])), dataset.subset(np.sort(perm[:n_val]))


# ------------------------------------------------------------------ files

DATASET_MAGIC = b"OBDS"
DATASET_VERSION = 1
HAS_ANGLE = 1
HAS_JOINTS = 2


def _record_dtype(flags: int) -> np.dtype:
    fields = [("image", "<f4", (IMAGE_SIZE * IMAGE_SIZE * 3,)), ("label", "u1")]
    if flags & HAS_ANGLE:
        fields.append(("angle", "<f8"))
    if flags & HAS_JOINTS:
        fields.append(("joints", "<f8", (9,)))
    return np.dtype(fields)


def dataset_to_bytes(ds: Dataset) -> bytes:
    flags = (HAS_ANGLE if ds.angles is not None else 0) | (HAS_JOINTS if ds.joints is not None else 0)
    rec = np.zeros(len(ds), dtype=_record_dtype(flags))
    rec["image"] = np.asarray(ds.images, dtype=np.float32).reshape(len(ds), -1)
    rec["label"] = ds.labels
    if ds.angles is not None:
        rec["angle"] = ds.angles
    if ds.joints is not None:
        rec["joints"] = np.asarray(ds.joints).reshape(len(ds), 9)
    header = DATASET_MAGIC + struct.pack("<IIB", DATASET_VERSION, len(ds), flags)
    return header + rec.tobytes()


def dataset_from_bytes(buf: bytes) -> Dataset:
    if len(buf) < 13:
        raise TruncatedFileError(f"dataset header truncated ({len(buf)} bytes)")
    if buf[:4] != DATASET_MAGIC:
        raise MagicMismatchError(f"bad dataset magic {buf[:4]!r}, expected {DATASET_MAGIC!r}")
    version, count, flags = struct.unpack("<IIB", buf[4:13])
    if version != DATASET_VERSION:
        raise VersionMismatchError(f"dataset version {version} not supported (expected {DATASET_VERSION})")
    dt = _record_dtype(flags)
    need = 13 + count * dt.itemsize
    if len(buf) < need:
        raise TruncatedFileError(f"dataset payload truncated: {len(buf)} bytes, expected {need}")
    if len(buf) > need:
        raise ValueError(f"{len(buf) - need} trailing bytes after dataset payload")
    rec = np.frombuffer(buf, dtype=dt, count=count, offset=13)
    return Dataset(
        images=rec["image"].reshape(count, IMAGE_SIZE, IMAGE_SIZE, 3).copy(),
        labels=rec["label"].astype(np.int64),
        angles=rec["angle"].copy() if flags & HAS_ANGLE else None,
        joints=rec["joints"].reshape(count, 3, 3).copy() if flags & HAS_JOINTS else None,
        provenance="imported")


def save_dataset(ds: Dataset, path) -> None:
    Path(path).write_bytes(dataset_to_bytes(ds))


def load_dataset(path) -> Dataset:
    return dataset_from_bytes(Path(path).read_bytes())


def restyle(style: StyleParams, **changes) -> StyleParams:
    return replace(style, **changes)
