from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orientbot import evaluate
from orientbot.evaluate import ConfusionMatrix, confusion

# Published validation counts, typed in again here so the oracle does not share state
# with the library table.
PUBLISHED = [
    [478, 19, 3, 0, 2, 0, 3, 122],
    [33, 186, 21, 3, 2, 3, 0, 4],
    [3, 31, 538, 95, 7, 1, 2, 2],
    [0, 1, 69, 703, 133, 4, 3, 10],
    [0, 0, 3, 62, 570, 30, 6, 7],
    [1, 1, 0, 1, 22, 196, 51, 5],
    [3, 0, 1, 0, 6, 30, 473, 108],
    [59, 0, 1, 0, 0, 0, 58, 825],
]


def _oracle():
    """Plain-Python weighted sums over the published counts."""
    total = diag = err = near = 0
    for t in range(8):
        for p in range(8):
            n = PUBLISHED[t][p]
            d = abs(t - p) * 45
            d = min(d, 360 - d)
            total += n
            err += n * d
            if t == p:
                diag += n
            elif d == 45:
                near += n
    return total, diag, err, near


def test_oracle_frozen_values():
    assert _oracle() == (5000, 3969, 52830, 943)


def test_table_matches_oracle():
    total, diag, err, near = _oracle()
    cm = ConfusionMatrix(evaluate.TABLE_II)
    assert np.array_equal(cm.counts, PUBLISHED)
    assert cm.total == total
    assert evaluate.accuracy_fraction(cm) == Fraction(diag, total)
    assert evaluate.accuracy(cm) == 0.7938
    assert evaluate.orientation_error_sum(cm) == err
    assert evaluate.mean_orientation_error(cm) == 10.566
    assert evaluate.nearest_label_fraction(cm) == near / (total - diag)
    assert round(evaluate.nearest_label_fraction(cm), 4) == 0.9146


def test_expanded_pairs_reproduce_table():
    preds, labels = evaluate.table_ii_pairs()
    cm = confusion(preds, labels)
    assert np.array_equal(cm.counts, evaluate.TABLE_II)
    assert evaluate.pairwise_mean_error(preds, labels) == pytest.approx(10.566, abs=1e-12)


def test_csv_roundtrip_layout():
    cm = ConfusionMatrix(evaluate.TABLE_II)
    text = cm.to_csv()
    assert text.splitlines()[0] == "degrees,0,45,90,135,180,225,270,315"
    assert text.splitlines()[6].startswith("225,1,1,0,1,22,196")
    assert np.array_equal(ConfusionMatrix.from_csv(text).counts, cm.counts)


def test_trivial_confusions():
    assert np.array_equal(confusion([0, 1, 2], [0, 1, 2]).counts[:3, :3], np.eye(3))
    cm = confusion([0] * 5, [0, 1, 2, 3, 4])
    assert np.count_nonzero(cm.counts[:, 1:]) == 0
    rng = np.random.default_rng(0)
    p, t = rng.integers(0, 8, 50), rng.integers(0, 8, 50)
    perm = rng.permutation(50)
    assert np.array_equal(confusion(p, t).counts, confusion(p[perm], t[perm]).counts)


def test_trivial_metrics():
    eye = ConfusionMatrix(np.eye(8, dtype=int) * 3)
    assert evaluate.accuracy(eye) == 1.0 and evaluate.mean_orientation_error(eye) == 0
    c = np.zeros((8, 8), dtype=int)
    c[0, 0], c[0, 1] = 9, 1
    assert evaluate.accuracy(ConfusionMatrix(c)) == 9 / 10
    far = np.zeros((8, 8), dtype=int)
    far[0, 4] = 7
    assert evaluate.mean_orientation_error(ConfusionMatrix(far)) == 180
    assert evaluate.nearest_label_fraction(ConfusionMatrix(far)) == 0.0
    near = np.zeros((8, 8), dtype=int)
    near[3, 2] = near[7, 0] = 2
    assert evaluate.nearest_label_fraction(ConfusionMatrix(near)) == 1.0


def test_rejections():
    with pytest.raises(ValueError):
        confusion([0, 1], [0])
    with pytest.raises(ValueError):
        evaluate.accuracy(ConfusionMatrix(np.zeros((8, 8), dtype=int)))
    with pytest.raises(ValueError):
        evaluate.mean_orientation_error(ConfusionMatrix(np.zeros((8, 8), dtype=int)))
    with pytest.raises(ValueError):
        evaluate.nearest_label_fraction(ConfusionMatrix(np.eye(8, dtype=int)))
    with pytest.raises(ValueError):
        ConfusionMatrix(-np.eye(8, dtype=int))


pairs = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=1, max_size=200)


@given(pairs, st.integers(0, 7))
@settings(max_examples=100)
def test_rotation_invariance_and_ranges(ps, k):
    p = np.array([a for a, _ in ps])
    t = np.array([b for _, b in ps])
    cm = confusion(p, t)
    rot = confusion((p + k) % 8, (t + k) % 8)
    acc, err = evaluate.accuracy(cm), evaluate.mean_orientation_error(cm)
    assert evaluate.accuracy(rot) == acc
    assert evaluate.mean_orientation_error(rot) == err
    assert 0 <= acc <= 1 and 0 <= err <= 180
    assert (err == 0) == (acc == 1)
    assert err == pytest.approx(evaluate.pairwise_mean_error(p, t), abs=1e-9)


def test_pred_csv_roundtrip(tmp_path):
    preds, labels = evaluate.table_ii_pairs()
    path = tmp_path / "p.csv"
    evaluate.write_pred_csv(path, preds, labels)
    p2, l2 = evaluate.read_pred_csv(path)
    assert np.array_equal(p2, preds) and np.array_equal(l2, labels)
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        evaluate.read_pred_csv(bad)
