"""Linear SVM check of a selected feature subset (primal Pegasos)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .core import BitChromosome
from .dataset import Dataset, SplitIndices
from .errors import ConfigError, ContractViolation, TrainingError


@dataclass(frozen=True)
class SvmSpec:
    lam: float = 1e-4
    epochs: int = 100
    seed: int = 0

    def __post_init__(self):
        if not self.lam > 0:
            raise ConfigError("classifier lambda must be > 0")
        if self.epochs < 1:
            raise ConfigError("classifier epochs must be >= 1")


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    lam: float
    epochs: int
    seed: int

    def decision(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights + self.bias

    def predict(self, X) -> np.ndarray:
        """Labels in {-1, +1}; a zero margin counts as +1."""
        return np.where(self.decision(X) >= 0, 1, -1)


def to_signed(labels) -> np.ndarray:
    return np.where(np.asarray(labels) == 1, 1.0, -1.0)


def objective(model: LinearModel, X, y_signed) -> float:
    """Primal objective: lam/2 * |w|^2 (bias included) + mean hinge loss."""
    margins = np.asarray(y_signed) * model.decision(X)
    reg = 0.5 * model.lam * (float(model.weights @ model.weights) + model.bias**2)
    return reg + float(np.mean(np.maximum(0.0, 1.0 - margins)))


def _design(ds: Dataset, rows, chrom: BitChromosome) -> np.ndarray:
    if chrom.d != ds.d:
        raise ContractViolation(f"chromosome length {chrom.d} != dataset width {ds.d}")
    if chrom.k == 0:
        raise ContractViolation("empty feature subset")
    return np.ascontiguousarray(ds.features[np.ix_(np.asarray(rows), chrom.selected())])


def train_svm(ds: Dataset, split_idx: SplitIndices, chrom: BitChromosome,
              spec: SvmSpec = SvmSpec(), backend=None) -> LinearModel:
    """Fit a linear SVM on the training rows restricted to ``chrom``.

    Stochastic subgradient descent with step ``1 / (lam * t)`` and the usual
    projection onto the ball of radius ``1 / sqrt(lam)``. The bias is an
    appended constant feature, so it is regularized with the weights.
    """
    backend = backend or kernels
    rows = np.asarray(split_idx.train_rows)
    X = _design(ds, rows, chrom)
    y = to_signed(ds.labels[rows])
    if len(np.unique(y)) < 2:
        raise TrainingError("training rows contain a single class")
    rng = np.random.default_rng([spec.seed, 0x5F3])
    order = np.ascontiguousarray(
        np.stack([rng.permutation(len(y)) for _ in range(spec.epochs)]).astype(np.int64)
    )
    w = backend.train_pegasos(X, np.ascontiguousarray(y), order, spec.lam)
    return LinearModel(np.asarray(w[:-1]), float(w[-1]), spec.lam, spec.epochs, spec.seed)


def accuracy(model: LinearModel, ds: Dataset, rows, chrom: BitChromosome) -> float:
    rows = np.asarray(rows)
    if rows.size == 0:
        raise ContractViolation("accuracy over an empty row set")
    X = _design(ds, rows, chrom)
    return float(np.mean(model.predict(X) == to_signed(ds.labels[rows])))


def error_rate(model: LinearModel, ds: Dataset, rows, chrom: BitChromosome) -> float:
    return 1.0 - accuracy(model, ds, rows, chrom)


def holdout_accuracy(ds: Dataset, split_idx: SplitIndices, chrom: BitChromosome,
                     spec: SvmSpec = SvmSpec()) -> float:
    """Train on the train rows, score on the test rows."""
    model = train_svm(ds, split_idx, chrom, spec)
    return accuracy(model, ds, split_idx.test_rows, chrom)

