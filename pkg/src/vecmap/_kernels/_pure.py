"""Pure-numpy fallback kernels.

These mirror the compiled versions in ``_fast.pyx`` bit-for-bit for the
Manhattan kernel: the accumulation order over point index j is identical
(term = |dx| + |dy|, then acc += term), so both backends return the same
floats and the same argmin ties.
"""

from __future__ import annotations

import numpy as np


def min_manhattan_over_perms(
    pred_pts: np.ndarray, gt_pts: np.ndarray, perms: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Minimum summed Manhattan distance over candidate point orderings.

    pred_pts: (P, n, 2) predicted point sets.
    gt_pts:   (n, 2) ground-truth point set.
    perms:    (K, n) integer index maps; ordering k aligns pred[j] with
              gt[perms[k, j]].

    Returns (costs (P,), best (P,)) where best is the index of the first
    ordering attaining the minimum.
    """
    pred = np.ascontiguousarray(pred_pts, dtype=np.float64)
    gt = np.ascontiguousarray(gt_pts, dtype=np.float64)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    n = gt.shape[0]
    permuted = gt[perms]  # (K, n, 2)
    acc = np.zeros((pred.shape[0], perms.shape[0]))
    for j in range(n):
        d = pred[:, None, j, :] - permuted[None, :, j, :]
        acc += np.abs(d[..., 0]) + np.abs(d[..., 1])
    best = np.argmin(acc, axis=1)
    return acc[np.arange(len(acc)), best], best


def chamfer_mean(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric mean Chamfer distance under Euclidean point distance."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    d = np.sqrt(d2)
    return 0.5 * (d.min(axis=1).mean() + d.min(axis=0).mean())
