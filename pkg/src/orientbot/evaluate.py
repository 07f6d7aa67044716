"""Confusion matrix, accuracy and mean orientation error for 8-way orientation classes.

Rows of the confusion matrix are true labels, columns are predictions. All
metrics are computed with integer sums and a single final division.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .labels import N_CLASSES, SECTOR_DEG, angular_difference

# Published validation confusion counts (rows: true 0..315 deg, cols: predicted)
TABLE_II = np.array([
    [478, 19, 3, 0, 2, 0, 3, 122],
    [33, 186, 21, 3, 2, 3, 0, 4],
    [3, 31, 538, 95, 7, 1, 2, 2],
    [0, 1, 69, 703, 133, 4, 3, 10],
    [0, 0, 3, 62, 570, 30, 6, 7],
    [1, 1, 0, 1, 22, 196, 51, 5],
    [3, 0, 1, 0, 6, 30, 473, 108],
    [59, 0, 1, 0, 0, 0, 58, 825],
], dtype=np.int64)

# class-distance matrix in units of 45 deg: 0..4
_STEPS = np.array([[min((i - j) % N_CLASSES, (j - i) % N_CLASSES) for j in range(N_CLASSES)]
                   for i in range(N_CLASSES)], dtype=np.int64)


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (N_CLASSES, N_CLASSES):
            raise ValueError(f"confusion matrix must be {N_CLASSES}x{N_CLASSES}, got {c.shape}")
        if np.any(c < 0):
            raise ValueError("confusion counts must be non-negative")
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degrees"] + [f"{int(c * SECTOR_DEG)}" for c in range(N_CLASSES)])
        for i, row in enumerate(self.counts):
            w.writerow([f"{int(i * SECTOR_DEG)}"] + [int(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ConfusionMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        return cls(np.array([[int(v) for v in r[1:]] for r in rows[1:] if r], dtype=np.int64))


def confusion(preds, labels) -> ConfusionMatrix:
    preds = np.asarray(preds, dtype=np.int64).ravel()
    labels = np.asarray(labels, dtype=np.int64).ravel()
    if preds.shape != labels.shape:
        raise ValueError(f"{len(preds)} predictions but {len(labels)} labels")
    if len(preds) == 0:
        raise ValueError("no predictions")
    for name, arr in (("prediction", preds), ("label", labels)):
        if arr.min() < 0 or arr.max() >= N_CLASSES:
            raise ValueError(f"{name} outside 0..{N_CLASSES - 1}")
    counts = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(counts, (labels, preds), 1)
    return ConfusionMatrix(counts)


def _require_total(cm: ConfusionMatrix) -> int:
    total = cm.total
    if total <= 0:
        raise ValueError("empty confusion matrix")
    return total


def accuracy_fraction(cm: ConfusionMatrix) -> Fraction:
    return Fraction(int(np.trace(cm.counts)), _require_total(cm))


def accuracy(cm: ConfusionMatrix) -> float:
    return int(np.trace(cm.counts)) / _require_total(cm)


def orientation_error_sum(cm: ConfusionMatrix) -> int:
    """Sum over all samples of |true - predicted| class-centre distance, whole degrees."""
    return int((cm.counts * _STEPS).sum()) * int(SECTOR_DEG)


def mean_orientation_error(cm: ConfusionMatrix) -> float:
    """Average wrapped angle between true and predicted class centres over ALL samples."""
    return orientation_error_sum(cm) / _require_total(cm)


def nearest_label_fraction(cm: ConfusionMatrix) -> float:
    """Share of the misclassified samples that landed in an adjacent (45 deg) class."""
    wrong = int(cm.counts.sum() - np.trace(cm.counts))
    if wrong == 0:
        raise ValueError("no misclassifications; nearest-label fraction undefined")
    return int(cm.counts[_STEPS == 1].sum()) / wrong


def metrics(cm: ConfusionMatrix) -> dict:
    out = dict(
        total=cm.total,
        correct=int(np.trace(cm.counts)),
        accuracy=accuracy(cm),
        mean_orientation_error_deg=mean_orientation_error(cm),
        orientation_error_sum_deg=orientation_error_sum(cm),
    )
    try:
        out["nearest_label_fraction"] = nearest_label_fraction(cm)
    except ValueError:
        out["nearest_label_fraction"] = None
    return out


def pairwise_mean_error(preds, labels) -> float:
    """Reference per-sample computation of the mean orientation error."""
    diffs = [angular_difference(p * SECTOR_DEG, t * SECTOR_DEG) for p, t in zip(preds, labels)]
    return float(np.mean(diffs))


def table_ii_pairs() -> tuple[np.ndarray, np.ndarray]:
    """Expand the published counts into (predictions, labels) arrays."""
    t, p = np.nonzero(TABLE_II)
    reps = TABLE_II[t, p]
    return np.repeat(p, reps), np.repeat(t, reps)


def read_pred_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """CSV with a header and columns ``label,prediction``. Returns (preds, labels)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"label", "prediction"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected header with 'label' and 'prediction' columns")
        labels, preds = [], []
        for row in reader:
            labels.append(int(row["label"]))
            preds.append(int(row["prediction"]))
    return np.array(preds, dtype=np.int64), np.array(labels, dtype=np.int64)


def write_pred_csv(path, preds, labels) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "prediction"])
        for t, p in zip(labels, preds):
            w.writerow([int(t), int(p)])
