import math

import numpy as np
import pytest

from moefs import _fallback
from moefs.core import BitChromosome
from moefs.dataset import Dataset, split
from moefs.errors import ConfigError, ContractViolation, EvaluationError
from moefs.neurocost import (Evaluator, MlpModel, TrainSpec, chromosome_seed, cross_entropy,
                             evaluate_subset, forward, loss_and_gradients, memoized_objectives,
                             mse, train)
from conftest import TRAINED, blobs


def toy_problem(k=3, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((10, k))
    y = (X[:, 0] > 0).astype(float)
    return X, y


def numeric_gradients(model, X, y, h=1e-5):
    out = {}
    for name in ("W1", "b1", "W2", "b2"):
        if name == "b2":
            def f(v):
                m = model.copy()
                m.b2 = v
                return loss_and_gradients(m, X, y)[0]
            out[name] = np.array((f(model.b2 + h) - f(model.b2 - h)) / (2 * h))
            continue
        arr = getattr(model, name)
        g = np.zeros_like(arr)
        for idx in np.ndindex(arr.shape):
            plus, minus = model.copy(), model.copy()
            getattr(plus, name)[idx] += h
            getattr(minus, name)[idx] -= h
            g[idx] = (loss_and_gradients(plus, X, y)[0] - loss_and_gradients(minus, X, y)[0]) / (2 * h)
        out[name] = g
    return out


def max_relative_error(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(1e-8, np.abs(a) + np.abs(b))))


@pytest.mark.parametrize("hidden", [10, 15, 20])
def test_gradient_check(hidden):
    X, y = toy_problem()
    model = MlpModel.init(X.shape[1], hidden, np.random.default_rng(hidden))
    _, analytic = loss_and_gradients(model, X, y)
    numeric = numeric_gradients(model, X, y)
    for name in analytic:
        assert max_relative_error(analytic[name], numeric[name]) < 1e-4, name


def test_forward_examples():
    zero = MlpModel(np.zeros((3, 2)), np.zeros(3), np.zeros(3), 0.0)
    assert forward(zero, [1.0, -4.0]) == 0.5
    m = MlpModel(np.array([[1.0]]), np.zeros(1), np.array([1.0]), 0.0)
    assert forward(m, [-2.0]) == pytest.approx(1 / (1 + math.exp(0.02)), abs=1e-15)
    assert round(forward(m, [-2.0]), 4) == 0.4950


def test_forward_deterministic_and_checked():
    m1 = MlpModel.init(4, 6, np.random.default_rng(9))
    m2 = MlpModel.init(4, 6, np.random.default_rng(9))
    x = np.arange(4.0)
    assert forward(m1, x) == forward(m2, x)
    with pytest.raises(ContractViolation):
        forward(m1, np.zeros(3))


def test_mse_examples():
    assert mse([1, 0], [1, 0]) == 0
    assert abs(mse([1], [0.5]) - 0.25) < 1e-12
    assert abs(mse([0, 1, 1], [0.1, 0.8, 0.6]) - 0.07) < 1e-12
    with pytest.raises(ContractViolation):
        mse([], [])


def test_cross_entropy_examples():
    assert abs(cross_entropy(1, 0.5) - math.log(2)) < 1e-12
    assert cross_entropy(0, 0.0) == pytest.approx(0, abs=1e-6)
    assert cross_entropy(1, 1e-7) == pytest.approx(-math.log(1e-7), rel=1e-12)
    assert cross_entropy(1, 0.0) == cross_entropy(1, 1e-7)


def test_losses_non_negative():
    rng = np.random.default_rng(1)
    y = rng.integers(0, 2, 100)
    p = rng.random(100)
    assert np.all(cross_entropy(y, p) >= 0)
    assert mse(y, p) > 0 and mse(y, y.astype(float)) == 0


def test_training_loss_decreases():
    ds = blobs()
    idx = split(ds, 0.7, 0)
    X, y = ds.features[idx.train_rows], ds.labels[idx.train_rows].astype(float)
    improved = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        model = MlpModel.init(2, 15, rng)
        res = train(model, X, y, X, y, TrainSpec(), rng)
        improved += res.train_loss[-1] < res.train_loss[0]
    assert improved >= 9


def test_separable_blobs_cost(blob_ds):
    ds, idx = blob_ds
    for seed in range(10):
        spec = TrainSpec(learning_rate=TRAINED.learning_rate, seed=seed)
        assert evaluate_subset(ds, idx, BitChromosome.from_indices([0, 1], 2), spec) < 0.1


def test_constant_labels_cost():
    rng = np.random.default_rng(2)
    ds = Dataset(rng.standard_normal((100, 2)), np.ones(100), ["a", "b"])
    idx = split(ds, 0.7, 0)
    # the best constant predictor has MSE 0 on single-class data
    assert evaluate_subset(ds, idx, BitChromosome.from_indices([0, 1], 2), TRAINED) <= 0.25


def test_evaluate_subset_pure(blob_ds, fast_spec):
    ds, idx = blob_ds
    c = BitChromosome.from_indices([1], 2)
    assert evaluate_subset(ds, idx, c, fast_spec) == evaluate_subset(ds, idx, c, fast_spec)


def test_evaluate_subset_errors(blob_ds, fast_spec):
    ds, idx = blob_ds
    with pytest.raises(ContractViolation):
        evaluate_subset(ds, idx, BitChromosome(np.zeros(2, bool)), fast_spec)
    with pytest.raises(ContractViolation):
        evaluate_subset(ds, idx, BitChromosome.from_indices([0], 3), fast_spec)
    tiny = type(idx)(np.array([0]), np.arange(1, ds.n), 0)
    with pytest.raises(EvaluationError):
        evaluate_subset(ds, tiny, BitChromosome.from_indices([0], 2), fast_spec)


def test_seed_derivation():
    a, b = BitChromosome.from_indices([0], 4), BitChromosome.from_indices([1], 4)
    assert chromosome_seed(0, a).entropy == chromosome_seed(0, a).entropy
    assert chromosome_seed(0, a).entropy != chromosome_seed(0, b).entropy
    assert chromosome_seed(0, a).entropy != chromosome_seed(1, a).entropy


def test_memoization(blob_ds, fast_spec):
    ds, idx = blob_ds
    ev = Evaluator(ds, idx, fast_spec)
    c = BitChromosome.from_indices([0], 2)
    twin = BitChromosome.from_indices([0], 2)
    objs = ev.evaluate_many([c, twin, BitChromosome.from_indices([1], 2)])
    assert ev.trainings == 2 and objs[0] is objs[1]
    assert objs[0].f2 == 1.0 and objs[0].f1 != objs[2].f1
    ev(c)
    assert ev.trainings == 2
    ev.clear()
    ev(c)
    assert ev.trainings == 1

    cache = {}
    first = memoized_objectives(ds, idx, c, fast_spec, cache)
    assert memoized_objectives(ds, idx, twin, fast_spec, cache) is first


def test_threaded_evaluator_matches_serial(fast_spec):
    ds = blobs(n=80, k=6, seed=4)
    idx = split(ds, 0.7, 0)
    rng = np.random.default_rng(0)
    chroms = [BitChromosome(rng.random(6) < 0.5) for _ in range(30)]
    chroms = [c for c in chroms if c.k]
    serial = Evaluator(ds, idx, fast_spec, jobs=1).evaluate_many(chroms)
    threaded = Evaluator(ds, idx, fast_spec, jobs=8).evaluate_many(chroms)
    assert serial == threaded


def test_fallback_backend_close(blob_ds, fast_spec):
    ds, idx = blob_ds
    c = BitChromosome.from_indices([0, 1], 2)
    fast = evaluate_subset(ds, idx, c, fast_spec)
    slow = evaluate_subset(ds, idx, c, fast_spec, backend=_fallback)
    assert slow == pytest.approx(fast, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("field,value", [("learning_rate", 0), ("momentum", 1.0), ("epochs", 0),
                                         ("batch_size", 0), ("val_fraction", 1.0), ("hidden", 0)])
def test_spec_validation(field, value):
    with pytest.raises(ConfigError):
        TrainSpec(**{field: value})
