"""Neural subset-cost evaluator.

A one-hidden-layer network (leaky ReLU hidden units, sigmoid output) is
trained briefly on the selected columns. The mean of its per-epoch
validation MSE is the subset cost ``f1``.
"""

from __future__ import annotations

import hashlib
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, MutableMapping

import numpy as np

from ._backend import kernels
from .core import BitChromosome, ObjectiveVector
from .dataset import Dataset, SplitIndices, round_half_up
from .errors import ConfigError, ContractViolation, EvaluationError

LEAKY_SLOPE = 0.01
PROB_CLAMP = 1e-7


@dataclass(frozen=True)
class TrainSpec:
    learning_rate: float = 0.001
    momentum: float = 0.9
    epochs: int = 10
    batch_size: int = 32
    val_fraction: float = 0.2
    hidden: int = 15
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be > 0")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError("momentum must be in [0, 1)")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if not 0.0 < self.val_fraction < 1.0:
            raise ConfigError("val_fraction must be in (0, 1)")
        if self.hidden < 1:
            raise ConfigError("hidden must be >= 1")


@dataclass
class MlpModel:
    W1: np.ndarray  # (hidden, k)
    b1: np.ndarray  # (hidden,)
    W2: np.ndarray  # (hidden,)
    b2: float

    @property
    def hidden(self) -> int:
        return self.W1.shape[0]

    @property
    def k(self) -> int:
        return self.W1.shape[1]

    @classmethod
    def init(cls, k: int, hidden: int, rng: np.random.Generator) -> "MlpModel":
        """Uniform init in +/- sqrt(6 / fan_in), zero biases."""
        lim1 = math.sqrt(6.0 / k)
        lim2 = math.sqrt(6.0 / hidden)
        W1 = rng.uniform(-lim1, lim1, size=(hidden, k))
        W2 = rng.uniform(-lim2, lim2, size=hidden)
        return cls(W1=W1, b1=np.zeros(hidden), W2=W2, b2=0.0)

    def copy(self) -> "MlpModel":
        return MlpModel(self.W1.copy(), self.b1.copy(), self.W2.copy(), float(self.b2))


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def leaky_relu(z, slope: float = LEAKY_SLOPE):
    return np.where(z > 0, z, slope * z)


def forward(model: MlpModel, x) -> float | np.ndarray:
    """Network output in (0, 1) for one input vector or a batch of rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.k:
        raise ContractViolation(f"input has {x.shape[-1]} features, model expects {model.k}")
    z1 = x @ model.W1.T + model.b1
    out = sigmoid(leaky_relu(z1) @ model.W2 + model.b2)
    return float(out) if x.ndim == 1 else out


def mse(y, yhat) -> float:
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.size == 0 or y.shape != yhat.shape:
        raise ContractViolation("mse needs two non-empty vectors of equal length")
    return float(np.mean((y - yhat) ** 2))


def cross_entropy(y, yhat):
    """Binary cross-entropy with the prediction clamped to [1e-7, 1 - 1e-7]."""
    p = np.clip(np.asarray(yhat, dtype=np.float64), PROB_CLAMP, 1.0 - PROB_CLAMP)
    y = np.asarray(y, dtype=np.float64)
    out = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    return float(out) if out.ndim == 0 else out


def loss_and_gradients(model: MlpModel, X, y) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy over the rows of ``X`` and its exact gradients.

    The gradient is taken through the unclamped sigmoid, which is exact
    wherever the clamp is inactive.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z1 = X @ model.W1.T + model.b1
    a1 = leaky_relu(z1)
    yhat = sigmoid(a1 @ model.W2 + model.b2)
    loss = float(np.mean(cross_entropy(y, yhat)))
    g2 = (yhat - y) / len(y)
    dz1 = np.outer(g2, model.W2) * np.where(z1 > 0, 1.0, LEAKY_SLOPE)
    grads = {
        "W1": dz1.T @ X,
        "b1": dz1.sum(axis=0),
        "W2": a1.T @ g2,
        "b2": np.array(g2.sum()),
    }
    return loss, grads


@dataclass
class TrainResult:
    model: MlpModel
    val_mse: np.ndarray
    train_loss: np.ndarray

    @property
    def cost(self) -> float:
        return float(np.mean(self.val_mse))


def train(model: MlpModel, X_fit, y_fit, X_val, y_val, spec: TrainSpec,
          rng: np.random.Generator, backend=None) -> TrainResult:
    """Train ``model`` in place and record per-epoch validation MSE."""
    backend = backend or kernels
    X_fit = np.ascontiguousarray(X_fit, dtype=np.float64)
    X_val = np.ascontiguousarray(X_val, dtype=np.float64)
    y_fit = np.ascontiguousarray(y_fit, dtype=np.float64)
    y_val = np.ascontiguousarray(y_val, dtype=np.float64)
    order = np.ascontiguousarray(
        np.stack([rng.permutation(len(y_fit)) for _ in range(spec.epochs)]).astype(np.int64)
    )
    b2 = np.array([model.b2])
    val_mse, train_loss = backend.train_mlp(
        X_fit, y_fit, X_val, y_val, model.W1, model.b1, model.W2, b2,
        order, spec.learning_rate, spec.momentum, spec.batch_size, LEAKY_SLOPE,
    )
    model.b2 = float(b2[0])
    return TrainResult(model, np.asarray(val_mse), np.asarray(train_loss))


def validation_holdout(n_train: int, spec: TrainSpec) -> tuple[np.ndarray, np.ndarray]:
    """Positions (into the training rows) used for fitting and for validation.

    Depends only on ``spec.seed`` so every subset is scored on the same rows.
    """
    if n_train < 2:
        raise EvaluationError(f"need at least 2 training rows, got {n_train}")
    n_val = min(max(round_half_up(spec.val_fraction * n_train), 1), n_train - 1)
    perm = np.random.default_rng([spec.seed, 0x5EED]).permutation(n_train)
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def chromosome_seed(master_seed: int, chrom: BitChromosome) -> np.random.SeedSequence:
    digest = hashlib.blake2b(chrom.key, digest_size=8).digest()
    return np.random.SeedSequence([int(master_seed) & (2**64 - 1), int.from_bytes(digest, "big")])


def evaluate_subset(ds: Dataset, split_idx: SplitIndices, chrom: BitChromosome,
                    spec: TrainSpec, seed=None, backend=None) -> float:
    """Cost ``f1`` of the feature subset ``chrom``.

    ``seed`` drives weight init and batch order; it defaults to the seed
    derived from ``spec.seed`` and the bit pattern.
    """
    if chrom.d != ds.d:
        raise ContractViolation(f"chromosome length {chrom.d} != dataset width {ds.d}")
    if chrom.k == 0:
        raise ContractViolation("cannot evaluate an empty subset; repair first")
    train_rows = np.asarray(split_idx.train_rows)
    fit_pos, val_pos = validation_holdout(len(train_rows), spec)
    cols = chrom.selected()
    X = ds.features[np.ix_(train_rows, cols)]
    y = ds.labels[train_rows].astype(np.float64)
    if seed is None:
        seed = chromosome_seed(spec.seed, chrom)
    rng = np.random.default_rng(seed)
    model = MlpModel.init(len(cols), spec.hidden, rng)
    result = train(model, X[fit_pos], y[fit_pos], X[val_pos], y[val_pos], spec, rng, backend)
    cost = result.cost
    if not math.isfinite(cost):
        raise EvaluationError(f"non-finite cost for subset {chrom.to_hex()}")
    return cost


def memoized_objectives(ds: Dataset, split_idx: SplitIndices, chrom: BitChromosome,
                        spec: TrainSpec, cache: MutableMapping[bytes, ObjectiveVector]) -> ObjectiveVector:
    """Objective vector for ``chrom``, training at most once per bit pattern."""
    hit = cache.get(chrom.key)
    if hit is not None:
        return hit
    obj = ObjectiveVector(evaluate_subset(ds, split_idx, chrom, spec), float(chrom.k)).check()
    return cache.setdefault(chrom.key, obj)


class Evaluator:
    """Memoizing, optionally threaded, objective evaluator for one run.

    The compiled training kernel releases the GIL, so ``jobs > 1`` gives
    real parallelism. Results are written to the cache in input order, so
    they never depend on completion order.
    """

    def __init__(self, ds: Dataset, split_idx: SplitIndices, spec: TrainSpec, jobs: int = 1):
        self.ds = ds
        self.split = split_idx
        self.spec = spec
        self.jobs = max(1, int(jobs))
        self.cache: dict[bytes, ObjectiveVector] = {}
        self.trainings = 0
        self._lock = threading.Lock()

    def __call__(self, chrom: BitChromosome) -> ObjectiveVector:
        return self.evaluate_many([chrom])[0]

    def _score(self, chrom: BitChromosome) -> ObjectiveVector:
        cost = evaluate_subset(self.ds, self.split, chrom, self.spec)
        return ObjectiveVector(cost, float(chrom.k)).check()

    def evaluate_many(self, chroms: Iterable[BitChromosome]) -> list[ObjectiveVector]:
        chroms = list(chroms)
        todo: dict[bytes, BitChromosome] = {}
        for c in chroms:
            if c.key not in self.cache and c.key not in todo:
                todo[c.key] = c
        pending = list(todo.values())
        if self.jobs > 1 and len(pending) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                scores = list(pool.map(self._score, pending))
        else:
            scores = [self._score(c) for c in pending]
        with self._lock:
            for c, obj in zip(pending, scores):
                self.cache.setdefault(c.key, obj)
            self.trainings += len(pending)
        return [self.cache[c.key] for c in chroms]

    def clear(self):
        self.cache.clear()
        self.trainings = 0
