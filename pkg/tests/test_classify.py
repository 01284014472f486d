import numpy as np
import pytest

from moefs.classify import (LinearModel, SvmSpec, accuracy, error_rate, holdout_accuracy,
                            objective, to_signed, train_svm)
from moefs.core import BitChromosome
from moefs.dataset import Dataset, split
from moefs.errors import ConfigError, TrainingError
from moefs.synthetic import make_benchmark
from conftest import blobs

BOTH = BitChromosome.from_indices([0, 1], 2)


def test_separable_training_accuracy(blob_ds):
    ds, idx = blob_ds
    model = train_svm(ds, idx, BOTH)
    assert accuracy(model, ds, idx.train_rows, BOTH) >= 0.99


def test_blob_test_accuracy(blob_ds):
    ds, idx = blob_ds
    assert holdout_accuracy(ds, idx, BOTH) >= 0.95


def test_huge_lambda_collapses_weights(blob_ds):
    ds, idx = blob_ds
    model = train_svm(ds, idx, BOTH, SvmSpec(lam=1e6, epochs=5))
    # the bias is regularized too, so every margin collapses toward 0
    assert np.abs(model.weights).max() < 1e-4
    assert np.abs(model.decision(ds.features[:, :2])).max() < 1e-4


def test_fixed_seed_identical(blob_ds):
    ds, idx = blob_ds
    a, b = train_svm(ds, idx, BOTH, SvmSpec(seed=3)), train_svm(ds, idx, BOTH, SvmSpec(seed=3))
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


def test_single_class_rejected():
    ds = Dataset(np.random.default_rng(0).standard_normal((20, 2)), np.zeros(20), ["a", "b"])
    with pytest.raises(TrainingError):
        train_svm(ds, split(ds, 0.7, 0), BOTH)


def test_accuracy_edge_cases():
    ds = Dataset(np.array([[1.0], [-1.0], [2.0], [-2.0]]), [1, 0, 1, 0], ["x"])
    c = BitChromosome.from_indices([0], 1)
    perfect = LinearModel(np.array([1.0]), 0.0, 1e-4, 1, 0)
    assert accuracy(perfect, ds, np.arange(4), c) == 1.0
    constant = LinearModel(np.array([0.0]), 1.0, 1e-4, 1, 0)
    assert accuracy(constant, ds, np.arange(4), c) == 0.5


def test_accuracy_plus_error_is_one(blob_ds):
    ds, idx = blob_ds
    model = train_svm(ds, idx, BitChromosome.from_indices([0], 2), SvmSpec(epochs=3))
    for rows in (idx.train_rows, idx.test_rows):
        assert accuracy(model, ds, rows, BitChromosome.from_indices([0], 2)) + \
            error_rate(model, ds, rows, BitChromosome.from_indices([0], 2)) == 1.0


def test_prediction_scale_invariant(blob_ds):
    ds, idx = blob_ds
    model = train_svm(ds, idx, BOTH)
    X = ds.features[:, :2]
    for s in (1e-3, 0.5, 7.0, 1e4):
        scaled = LinearModel(model.weights * s, model.bias * s, model.lam, model.epochs, model.seed)
        assert np.array_equal(scaled.predict(X), model.predict(X))


def _cases():
    for seed in range(10):
        yield blobs(n=60, k=3, seed=seed), seed
        yield make_benchmark(seed=seed)[0], seed


@pytest.mark.parametrize("ds,seed", list(_cases()))
def test_objective_not_worse_than_zero_model(ds, seed):
    idx = split(ds, 0.7, seed)
    c = BitChromosome(np.ones(ds.d, bool))
    model = train_svm(ds, idx, c, SvmSpec(seed=seed))
    X, y = ds.features[idx.train_rows], to_signed(ds.labels[idx.train_rows])
    zero = LinearModel(np.zeros(ds.d), 0.0, model.lam, 0, 0)
    assert objective(model, X, y) <= objective(zero, X, y)


def test_spec_validation():
    with pytest.raises(ConfigError):
        SvmSpec(lam=0)
    with pytest.raises(ConfigError):
        SvmSpec(epochs=0)
