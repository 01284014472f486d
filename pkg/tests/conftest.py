import json

import numpy as np
import pytest

from moefs.dataset import Dataset, split
from moefs.neurocost import TrainSpec


def blobs(n=100, k=2, sep=6.0, seed=0):
    """Two unit Gaussian clouds centred at -sep/2 and +sep/2 on every axis."""
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    X = rng.standard_normal((n, k)) + np.where(y[:, None] == 1, sep / 2, -sep / 2)
    return Dataset(X, y.astype(np.int8), [f"b{j}" for j in range(k)])


def label_plus_noise(n=120, seed=0):
    """Feature 0 is the label (scaled), feature 1 is pure noise."""
    rng = np.random.default_rng(seed)
    y = (np.arange(n) % 2).astype(np.int8)
    X = np.column_stack([np.where(y == 1, 1.0, -1.0), rng.standard_normal(n)])
    return Dataset(X, y, ["signal", "noise"])


@pytest.fixture
def blob_ds():
    ds = blobs()
    return ds, split(ds, 0.7, 0)


@pytest.fixture
def toy2():
    ds = label_plus_noise()
    return ds, split(ds, 0.7, 0)


# Enough updates for the small toy sets to actually train; at a rate of 1e-3
# a 70-row fit set gets ~30 momentum steps and stays near its initialization.
TRAINED = TrainSpec(learning_rate=0.1, seed=0)


@pytest.fixture
def fast_spec():
    return TrainSpec(learning_rate=0.1, epochs=10, hidden=8, seed=0)


@pytest.fixture
def write_toy_config(tmp_path):
    """Write a small CSV plus a JSON config into ``tmp_path``; returns the config path."""

    def make(extra=None, n=90, d=6, seed=0):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((n, d))
        y = (X[:, 0] + X[:, 1] > 0).astype(int)
        lines = [",".join([f"f{j}" for j in range(d)] + ["label"])]
        lines += [",".join([repr(v) for v in row] + [str(t)]) for row, t in zip(X.tolist(), y)]
        (tmp_path / "toy.csv").write_text("\n".join(lines) + "\n")
        doc = {
            "data": {"path": "toy.csv", "label_spec": {"column": "label"}},
            "engine": {"pop_size": 12, "generations": 3, "hidden_neurons": 5},
            "evaluator": {"learning_rate": 0.1, "epochs": 4},
            "classifier": {"lambda": 0.001, "epochs": 20},
            "output": {"directory": "out"},
        }
        for section, values in (extra or {}).items():
            doc.setdefault(section, {}).update(values)
        path = tmp_path / "config.json"
        path.write_text(json.dumps(doc))
        return path

    return make


# One line per acceptance criterion, printed after the run.
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
