"""Two-level ranking: non-dominated fronts, then crowding distance."""

from __future__ import annotations

import functools
from typing import Sequence

import numpy as np

from ._backend import kernels
from .core import Individual
from .errors import ContractViolation

__all__ = [
    "BOUNDARY",
    "DEGENERATE_RANGE",
    "non_dominated_sort",
    "crowding_distance",
    "crowded_compare",
    "crowded_order",
    "assign_rank_and_crowding",
]

# Sentinel distance for front extremes. Any finite sum with it stays BOUNDARY,
# and BOUNDARY == BOUNDARY, so comparisons stay well defined.
BOUNDARY = float("inf")
DEGENERATE_RANGE = 1e-12


def _as_matrix(objs) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(objs, dtype=np.float64))
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if arr.size else arr.reshape(0, 2)
    if arr.ndim != 2:
        raise ContractViolation(f"objectives must be a 2-D array, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ContractViolation("non-finite objective value")
    return arr


def non_dominated_sort(objs) -> list[list[int]]:
    """Partition row indices of ``objs`` into fronts F1, F2, ...

    Each front lists indices in ascending order. An empty input gives an
    empty partition.
    """
    arr = _as_matrix(objs)
    if arr.shape[0] == 0:
        return []
    rank = kernels.nd_rank(arr)
    n_fronts = int(rank.max())
    return [np.flatnonzero(rank == f).tolist() for f in range(1, n_fronts + 1)]


def crowding_distance(front_objs) -> np.ndarray:
    """Crowding distance of each member of one front.

    Per objective the front is sorted by cost; the two extremes receive
    ``BOUNDARY`` and interior members ``(C[i+1] - C[i-1]) / |C[0] - C[-1]|``.
    Contributions are summed over objectives. An objective whose range is
    below ``DEGENERATE_RANGE`` contributes nothing.

    Members with identical objective vectors share one distance, and ties in
    the sort key are broken by the remaining objectives, so the result
    depends only on the set of vectors and not on input order.
    """
    arr = _as_matrix(front_objs)
    n, m = arr.shape
    if n == 0:
        raise ContractViolation("crowding distance of an empty front")
    uniq, inverse = np.unique(arr, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    u = uniq.shape[0]
    dist = np.zeros(u)
    if u <= 2:
        dist[:] = BOUNDARY
        return dist[inverse]
    for j in range(m):
        # lexsort: last key is primary; other objectives break ties
        keys = [uniq[:, c] for c in reversed(range(m)) if c != j] + [uniq[:, j]]
        order = np.lexsort(keys)
        col = uniq[order, j]
        span = abs(col[0] - col[-1])
        dist[order[0]] = BOUNDARY
        dist[order[-1]] = BOUNDARY
        if span < DEGENERATE_RANGE:
            continue
        dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist[inverse]


def _check_ranked(ind: Individual):
    if ind.rank is None or ind.crowd is None or ind.obj is None:
        raise ContractViolation("crowded comparison needs rank, crowding and objectives")


def crowded_compare(a: Individual, b: Individual) -> int:
    """Negative if ``a`` precedes ``b``, positive if ``b`` precedes ``a``, 0 on a full tie.

    Lower rank wins, then larger crowding distance, then fewer features,
    then lower cost. Full ties are left to the caller's stable ordering.
    """
    _check_ranked(a)
    _check_ranked(b)
    ka = (a.rank, -a.crowd, a.obj.f2, a.obj.f1)
    kb = (b.rank, -b.crowd, b.obj.f2, b.obj.f1)
    return (ka > kb) - (ka < kb)


def crowded_order(individuals: Sequence[Individual]) -> list[int]:
    """Indices of ``individuals`` best-first under :func:`crowded_compare` (stable)."""
    return sorted(
        range(len(individuals)),
        key=functools.cmp_to_key(lambda i, j: crowded_compare(individuals[i], individuals[j])),
    )


def assign_rank_and_crowding(individuals: Sequence[Individual]) -> list[list[int]]:
    """Set ``rank`` and ``crowd`` on every individual in place; return the fronts."""
    if not individuals:
        return []
    objs = np.array([tuple(ind.obj) for ind in individuals], dtype=np.float64)
    fronts = non_dominated_sort(objs)
    for r, front in enumerate(fronts, start=1):
        dist = crowding_distance(objs[front])
        for idx, d in zip(front, dist):
            individuals[idx].rank = r
            individuals[idx].crowd = float(d)
    return fronts
