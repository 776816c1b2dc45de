"""Hierarchical bipartite matching.

Two levels, run in order: instance-level assignment between predicted
and ground-truth elements (Hungarian over a class + position cost), then
point-level assignment picking, per matched pair, the ordering from the
element's equivalent-permutation group with the lowest summed Manhattan
distance.

Costs are computed in whatever coordinate frame the caller supplies; by
convention predictions and ground truth are both normalized to the unit
square first (see MapElement.normalized), keeping class and position
terms commensurate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _kernels
from .geometry import (
    ElementClass,
    MapElement,
    PermutationDescriptor,
    as_points,
    permutation_group,
)

#: Floor keeping log terms finite; also used in the classification loss.
FOCAL_EPS = 1e-12


class CapacityError(ValueError):
    """Raised when there are fewer predictions than ground-truth elements."""


class PositionCost(enum.Enum):
    POINT2POINT = "point2point"
    CHAMFER = "chamfer"


@dataclass(frozen=True)
class PredictedElement:
    """Per-class confidence scores plus a predicted point set."""

    scores: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.shape != (3,):
            raise ValueError(f"expected 3 class scores, got shape {scores.shape}")
        if np.any(scores < 0) or np.any(scores > 1):
            raise ValueError("scores must lie in [0, 1]")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "points", as_points(self.points))


@dataclass(frozen=True)
class CostConfig:
    position_cost: PositionCost = PositionCost.POINT2POINT
    focal_gamma: float = 2.0
    focal_alpha: float = 0.25

    def __post_init__(self):
        if self.focal_gamma < 0:
            raise ValueError("focal_gamma must be >= 0")
        if not 0 < self.focal_alpha < 1:
            raise ValueError("focal_alpha must lie in (0, 1)")


@dataclass(frozen=True)
class InstanceAssignment:
    """Matched (prediction index, ground-truth index) pairs.

    Predictions absent from ``pairs`` are implicitly assigned to the
    no-object label.
    """

    pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PointAssignment:
    perm: PermutationDescriptor
    cost: float


@dataclass(frozen=True)
class HierarchicalMatch:
    instance: InstanceAssignment
    point_level: dict[tuple[int, int], PointAssignment]


def manhattan_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.abs(a - b).sum())


def focal_class_cost(
    scores, target_class: ElementClass, cfg: CostConfig = CostConfig()
) -> float:
    """Focal matching cost for one class slot: positive minus negative term.

    Lower is better; approaches -inf (capped by the epsilon floor) as the
    target-class score approaches 1.
    """
    p = float(np.asarray(scores)[int(target_class)])
    gamma, alpha = cfg.focal_gamma, cfg.focal_alpha
    pos = alpha * (1.0 - p) ** gamma * -math.log(p + FOCAL_EPS)
    neg = (1.0 - alpha) * p**gamma * -math.log(1.0 - p + FOCAL_EPS)
    return pos - neg


def point_level_match(pred_points, gt: MapElement) -> PointAssignment:
    """Best ordering of the ground-truth point set against a prediction.

    Minimizes the summed Manhattan distance over the element's
    equivalent-permutation group; ties break toward the first member in
    group enumeration order.
    """
    pred = as_points(pred_points)
    if len(pred) != gt.n_points:
        raise ValueError(
            f"point count mismatch: {len(pred)} predicted vs {gt.n_points} ground truth"
        )
    group = gt.group()
    costs, best = _kernels.min_manhattan_over_perms(
        pred[None, :, :], gt.points, group.index_maps()
    )
    return PointAssignment(perm=group.members[int(best[0])], cost=float(costs[0]))


def chamfer_position_cost(pred_points, gt_points) -> float:
    """Symmetric mean Chamfer distance (ablation alternative cost)."""
    a = as_points(pred_points)
    b = as_points(gt_points)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("chamfer cost needs non-empty point sets")
    return float(_kernels.chamfer_mean(a, b))


def _cost_matrix(
    preds: list[PredictedElement],
    gts: list[MapElement],
    cfg: CostConfig,
    fixed_order: bool,
) -> np.ndarray:
    n_pred, n_gt = len(preds), len(gts)
    cost = np.zeros((n_pred, n_gt))
    pred_pts = np.stack([p.points for p in preds]) if preds else None
    for g, gt in enumerate(gts):
        for p, pred in enumerate(preds):
            cost[p, g] = focal_class_cost(pred.scores, gt.element_class, cfg)
        if cfg.position_cost is PositionCost.CHAMFER:
            for p in range(n_pred):
                cost[p, g] += chamfer_position_cost(pred_pts[p], gt.points)
        else:
            if fixed_order:
                perms = np.arange(gt.n_points)[None, :]
            else:
                perms = permutation_group(gt.kind, gt.n_points).index_maps()
            pos, _ = _kernels.min_manhattan_over_perms(pred_pts, gt.points, perms)
            cost[:, g] += pos
    return cost


def instance_match(
    preds: list[PredictedElement],
    gts: list[MapElement],
    cfg: CostConfig = CostConfig(),
    fixed_order: bool = False,
) -> InstanceAssignment:
    """Globally optimal prediction-to-ground-truth assignment.

    Solves the rectangular assignment problem over the class + position
    cost matrix; predictions left without a ground truth are implicitly
    no-object.  ``fixed_order`` restricts the point2point position cost
    to the stored point order (the fixed-permutation baseline).
    """
    if len(preds) < len(gts):
        raise CapacityError(
            f"{len(preds)} predictions cannot cover {len(gts)} ground-truth elements"
        )
    if not gts:
        return InstanceAssignment(pairs=())
    cost = _cost_matrix(preds, gts, cfg, fixed_order)
    rows, cols = linear_sum_assignment(cost)
    pairs = tuple(sorted((int(r), int(c)) for r, c in zip(rows, cols)))
    return InstanceAssignment(pairs=pairs)


def hierarchical_match(
    preds: list[PredictedElement],
    gts: list[MapElement],
    cfg: CostConfig = CostConfig(),
    fixed_order: bool = False,
) -> HierarchicalMatch:
    """Instance-level matching followed by per-pair point-level matching.

    With ``fixed_order`` the point-level step is skipped in favor of the
    identity ordering, modeling supervision with a single imposed
    permutation.
    """
    instance = instance_match(preds, gts, cfg, fixed_order=fixed_order)
    point_level: dict[tuple[int, int], PointAssignment] = {}
    for p, g in instance.pairs:
        gt = gts[g]
        if fixed_order:
            identity = permutation_group(gt.kind, gt.n_points).members[0]
            cost = float(np.abs(preds[p].points - gt.points).sum())
            point_level[(p, g)] = PointAssignment(perm=identity, cost=cost)
        else:
            point_level[(p, g)] = point_level_match(preds[p].points, gt)
    return HierarchicalMatch(instance=instance, point_level=point_level)
