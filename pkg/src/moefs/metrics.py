"""Front-quality helpers for two minimized objectives."""

from __future__ import annotations

import numpy as np

from .ranking import non_dominated_sort


def non_dominated_mask(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    mask = np.zeros(len(pts), dtype=bool)
    if len(pts):
        mask[non_dominated_sort(pts)[0]] = True
    return mask


def hypervolume_2d(points, ref) -> float:
    """Area dominated by ``points`` and bounded above by ``ref``.

    Points not strictly better than ``ref`` in both objectives add nothing.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    r0, r1 = float(ref[0]), float(ref[1])
    pts = pts[(pts[:, 0] < r0) & (pts[:, 1] < r1)]
    if len(pts) == 0:
        return 0.0
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    area = 0.0
    best1 = r1
    for x, y in pts:
        if y < best1:
            area += (r0 - x) * (best1 - y)
            best1 = y
    return float(area)
