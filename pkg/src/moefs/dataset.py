"""CSV ingestion, cleaning, standardization and train/test splitting."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, DataError

__all__ = [
    "DEFAULT_MISSING_TOKENS",
    "Dataset",
    "SplitIndices",
    "load_csv",
    "preprocess",
    "split",
    "round_half_up",
]

DEFAULT_MISSING_TOKENS = ("", "NaN", "nan")


@dataclass
class Dataset:
    """Feature matrix plus binary labels.

    Missing cells are NaN until :func:`preprocess` imputes them.
    ``zero_variance`` is filled in by preprocessing.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: list[str]
    provenance: dict = field(default_factory=dict)
    zero_variance: np.ndarray | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int8)
        if self.features.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {self.features.shape}")
        if self.features.shape[0] != self.labels.shape[0]:
            raise DataError(
                f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels"
            )
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise DataError("labels must be 0 or 1")
        if len(self.feature_names) != self.features.shape[1]:
            raise DataError("feature_names length does not match column count")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.features)


@dataclass(frozen=True)
class SplitIndices:
    train_rows: np.ndarray
    test_rows: np.ndarray
    seed: int


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _read_rows(path: Path, delimiter: str | None) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            if delimiter is None or delimiter == ",":
                return [row for row in csv.reader(fh) if row]
            if delimiter == "whitespace":
                return [line.split() for line in fh if line.strip()]
            return [row for row in csv.reader(fh, delimiter=delimiter) if row]
    except FileNotFoundError as exc:
        raise DataError(f"data file not found: {path}") from exc
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _map_label(token: str, mapping: Mapping[str, int], row: int) -> int:
    token = token.strip()
    if token in mapping:
        return int(mapping[token])
    try:
        value = float(token)
    except ValueError:
        value = None
    if value is not None:
        for key, target in mapping.items():
            try:
                if float(key) == value:
                    return int(target)
            except ValueError:
                continue
    raise DataError(f"label {token!r} has no mapping (known: {sorted(mapping)})", row=row)


def load_csv(
    path,
    label_column: str | int | None = -1,
    missing_tokens: Sequence[str] = DEFAULT_MISSING_TOKENS,
    label_mapping: Mapping[str, int] | None = None,
    header: bool = True,
    labels_path=None,
    delimiter: str | None = None,
) -> Dataset:
    """Parse a delimited text file into a :class:`Dataset`.

    Labels come either from ``label_column`` (a header name or a column
    index, negative indices allowed) or, when ``labels_path`` is given, from
    the first column of that separate file. Raw label tokens are translated
    through ``label_mapping``; the default maps ``"0"``/``"1"`` to themselves.
    """
    path = Path(path)
    mapping = dict(label_mapping) if label_mapping else {"0": 0, "1": 1}
    for key, target in mapping.items():
        if target not in (0, 1):
            raise ConfigError(f"label mapping {key!r} -> {target!r} must target 0 or 1")
    missing = set(missing_tokens)

    rows = _read_rows(path, delimiter)
    if not rows:
        raise DataError(f"{path} is empty")
    first_data_line = 1
    if header:
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        first_data_line = 2
    else:
        names = [f"f{i}" for i in range(len(rows[0]))]
    ncols = len(names)

    label_idx = None
    if labels_path is None:
        if label_column is None:
            raise ConfigError("either label_column or labels_path is required")
        if isinstance(label_column, str) and not _is_int(label_column):
            if label_column not in names:
                raise ConfigError(f"label column {label_column!r} not in header")
            label_idx = names.index(label_column)
        else:
            label_idx = int(label_column)
            if not -ncols <= label_idx < ncols:
                raise ConfigError(f"label column index {label_idx} out of range for {ncols} columns")
            label_idx %= ncols

    feat_cols = [c for c in range(ncols) if c != label_idx]
    X = np.empty((len(rows), len(feat_cols)))
    raw_labels: list[tuple[str, int]] = []
    for i, row in enumerate(rows):
        line = first_data_line + i
        if len(row) != ncols:
            raise DataError(f"expected {ncols} columns, found {len(row)}", row=line)
        for j, c in enumerate(feat_cols):
            cell = row[c].strip()
            if cell in missing:
                X[i, j] = np.nan
                continue
            try:
                X[i, j] = float(cell)
            except ValueError:
                raise DataError(
                    f"non-numeric value {cell!r} in column {names[c]!r}", row=line
                ) from None
            if not math.isfinite(X[i, j]):
                X[i, j] = np.nan
        if label_idx is not None:
            raw_labels.append((row[label_idx], line))

    if labels_path is not None:
        label_rows = _read_rows(Path(labels_path), delimiter)
        if len(label_rows) != len(rows):
            raise DataError(
                f"{len(rows)} feature rows but {len(label_rows)} rows in {labels_path}"
            )
        raw_labels = [(r[0], i + 1) for i, r in enumerate(label_rows)]

    y = np.array([_map_label(tok, mapping, line) for tok, line in raw_labels], dtype=np.int8)
    return Dataset(
        features=X,
        labels=y,
        feature_names=[names[c] for c in feat_cols],
        provenance={
            "source": str(path),
            "labels_source": str(labels_path) if labels_path is not None else None,
            "missing_cells": int(np.isnan(X).sum()),
            "steps": [],
        },
    )


def _is_int(text: str) -> bool:
    try:
        int(text)
    except ValueError:
        return False
    return True


def preprocess(ds: Dataset, split_idx: SplitIndices | None = None) -> Dataset:
    """Median-impute missing cells, then z-score every feature.

    Imputation medians and standardization statistics come from the train
    rows of ``split_idx`` when given, otherwise from all rows. Standardization
    uses the population standard deviation. Columns with zero variance are
    set to 0 and flagged in ``zero_variance``.
    """
    X = ds.features.copy()
    stat_rows = split_idx.train_rows if split_idx is not None else np.arange(ds.n)
    ref = X[stat_rows]

    all_missing = np.all(np.isnan(ref), axis=0)
    if np.any(all_missing):
        bad = [ds.feature_names[j] for j in np.flatnonzero(all_missing)]
        raise DataError(f"feature(s) entirely missing: {', '.join(bad[:10])}")

    imputed = 0
    if np.isnan(X).any():
        medians = np.nanmedian(ref, axis=0)
        holes = np.isnan(X)
        imputed = int(holes.sum())
        X[holes] = np.take(medians, np.nonzero(holes)[1])
        ref = X[stat_rows]

    mean = ref.mean(axis=0)
    std = ref.std(axis=0)
    zero_var = std <= 1e-12 * np.maximum(1.0, np.abs(mean))
    safe = np.where(zero_var, 1.0, std)
    X = (X - mean) / safe
    X[:, zero_var] = 0.0

    provenance = dict(ds.provenance)
    provenance["steps"] = list(provenance.get("steps", [])) + [
        {
            "step": "preprocess",
            "imputed_cells": imputed,
            "zero_variance_features": int(zero_var.sum()),
            "statistics": "train" if split_idx is not None else "all",
        }
    ]
    return replace(ds, features=X, provenance=provenance, zero_variance=zero_var)


def split(ds: Dataset | int, ratio: float = 0.7, seed: int = 0) -> SplitIndices:
    """Seeded shuffle split with ``round(ratio * n)`` training rows."""
    n = ds if isinstance(ds, int) else ds.n
    if not 0.0 < ratio < 1.0:
        raise ConfigError(f"split ratio must be in (0, 1), got {ratio}")
    if n < 2:
        raise ConfigError(f"need at least 2 rows to split, got {n}")
    n_train = min(max(round_half_up(ratio * n), 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    return SplitIndices(
        train_rows=np.sort(perm[:n_train]),
        test_rows=np.sort(perm[n_train:]),
        seed=int(seed),
    )
