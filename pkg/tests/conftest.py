import os
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from orientbot import data, nnet

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "orientbot" / "fixtures"

# Synthetic-training recipe used by the acceptance gate and the tests that need a trained model.
SYNTH_N = 8000
SYNTH_SEED = 7
VAL_FRAC = 0.2
TRAIN_CFG = dict(learning_rate=float(os.environ.get("ORIENTBOT_TEST_LR", "0.08")),
                 minibatch_size=32, minibatches_per_step=100, steps=30, seed=0,
                 target_accuracy=0.90)

# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@dataclass
class TrainedRun:
    model: nnet.OrientationModel
    report: nnet.TrainReport
    train: data.Dataset
    val: data.Dataset
    model_path: Path
    wall_seconds: float
    gen_seconds: float


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


_GEN_SECONDS = {}


@pytest.fixture(scope="session")
def synthetic_split():
    t0 = time.perf_counter()
    ds = data.generate_synthetic(SYNTH_N, seed=SYNTH_SEED)
    _GEN_SECONDS["synthetic"] = time.perf_counter() - t0
    return data.split(ds, VAL_FRAC, seed=SYNTH_SEED)


@pytest.fixture(scope="session")
def trained_run(synthetic_split, tmp_path_factory):
    train, val = synthetic_split
    model = nnet.build_paper_model(seed=0)
    t0 = time.perf_counter()
    report = nnet.train(model, train, nnet.TrainConfig(**TRAIN_CFG), val)
    wall = time.perf_counter() - t0
    path = tmp_path_factory.mktemp("model") / "synthetic.obnn"
    nnet.save_model(model, path)
    return TrainedRun(model, report, train, val, path, wall, _GEN_SECONDS.get("synthetic", 0.0))


def rel_error(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    denom = max(np.linalg.norm(a), np.linalg.norm(b))
    return 0.0 if denom == 0 else float(np.linalg.norm(a - b) / denom)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
