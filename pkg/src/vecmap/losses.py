"""Training objective: classification, point2point and edge-direction terms.

The total loss is a weighted sum of a sigmoid focal classification loss
over all prediction slots, the summed Manhattan distance over
point-level-aligned pairs, and the negative cosine similarity between
paired edges of aligned elements.  Gradients are analytic, with the
hierarchical assignment held fixed (no differentiation through either
argmin), which is how set-prediction losses are trained in practice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ElementKind, MapElement, apply_permutation
from .matching import FOCAL_EPS, CostConfig, HierarchicalMatch, PredictedElement

#: Edges shorter than this are treated as degenerate: cosine similarity 0.
EDGE_NORM_FLOOR = 1e-8


@dataclass(frozen=True)
class LossWeights:
    lambda_cls: float = 2.0
    alpha_p2p: float = 5.0
    beta_dir: float = 5e-3

    def __post_init__(self):
        if min(self.lambda_cls, self.alpha_p2p, self.beta_dir) < 0:
            raise ValueError("loss weights must be non-negative")


@dataclass(frozen=True)
class LossBreakdown:
    cls: float
    p2p: float
    dir: float
    total: float


@dataclass(frozen=True)
class LossGradients:
    d_points: np.ndarray  # (n_preds, n_points, 2)
    d_scores: np.ndarray  # (n_preds, 3)


def _class_targets(preds, gts, match: HierarchicalMatch) -> np.ndarray:
    targets = np.zeros((len(preds), 3))
    for p, g in match.instance.pairs:
        targets[p, int(gts[g].element_class)] = 1.0
    return targets


def _focal_terms(scores: np.ndarray, targets: np.ndarray, cfg: CostConfig):
    """Per-slot sigmoid focal loss and its gradient wrt the scores."""
    gamma, alpha = cfg.focal_gamma, cfg.focal_alpha
    p = scores
    pos_log = np.log(p + FOCAL_EPS)
    neg_log = np.log(1.0 - p + FOCAL_EPS)
    loss = np.where(
        targets > 0.5,
        alpha * (1.0 - p) ** gamma * -pos_log,
        (1.0 - alpha) * p**gamma * -neg_log,
    )
    grad = np.where(
        targets > 0.5,
        alpha * (gamma * (1.0 - p) ** (gamma - 1.0) * pos_log - (1.0 - p) ** gamma / (p + FOCAL_EPS)),
        (1.0 - alpha) * (-gamma * p ** (gamma - 1.0) * neg_log + p**gamma / (1.0 - p + FOCAL_EPS)),
    )
    return loss, grad


def classification_loss(
    preds: list[PredictedElement],
    gts: list[MapElement],
    match: HierarchicalMatch,
    cfg: CostConfig = CostConfig(),
) -> float:
    """Sigmoid focal loss over every prediction slot and class.

    Matched predictions get a one-hot target at the assigned class;
    no-object predictions get an all-zero target.
    """
    scores = np.stack([p.scores for p in preds]) if preds else np.zeros((0, 3))
    loss, _ = _focal_terms(scores, _class_targets(preds, gts, match), cfg)
    return float(loss.sum())


def _aligned_gt(gt: MapElement, match: HierarchicalMatch, pair) -> np.ndarray:
    return apply_permutation(gt.points, match.point_level[pair].perm)


def point2point_loss(
    preds: list[PredictedElement],
    gts: list[MapElement],
    match: HierarchicalMatch,
) -> float:
    """Summed Manhattan distance over aligned point pairs of matched elements."""
    total = 0.0
    for pair in match.instance.pairs:
        p, g = pair
        total += float(np.abs(preds[p].points - _aligned_gt(gts[g], match, pair)).sum())
    return total


def _edge_cosines(pred_pts: np.ndarray, gt_aligned: np.ndarray, kind: ElementKind):
    """Per-edge cosine similarities and the gradient wrt predicted points."""
    n = len(pred_pts)
    n_edges = n if kind is ElementKind.POLYGON else n - 1
    pe = pred_pts - np.roll(pred_pts, -1, axis=0)
    ge = gt_aligned - np.roll(gt_aligned, -1, axis=0)
    pe, ge = pe[:n_edges], ge[:n_edges]

    pn = np.linalg.norm(pe, axis=1)
    gn = np.linalg.norm(ge, axis=1)
    ok = (pn > EDGE_NORM_FLOOR) & (gn > EDGE_NORM_FLOOR)
    safe_pn = np.where(ok, pn, 1.0)
    safe_gn = np.where(ok, gn, 1.0)
    cos = np.where(ok, (pe * ge).sum(axis=1) / (safe_pn * safe_gn), 0.0)

    # d cos / d pred_edge; degenerate edges contribute nothing.
    dcos = ge / (safe_pn * safe_gn)[:, None] - cos[:, None] * pe / (safe_pn**2)[:, None]
    dcos[~ok] = 0.0

    d_points = np.zeros_like(pred_pts)
    for j in range(n_edges):
        d_points[j] += dcos[j]
        d_points[(j + 1) % n] -= dcos[j]
    return cos, d_points


def edge_direction_loss(
    preds: list[PredictedElement],
    gts: list[MapElement],
    match: HierarchicalMatch,
) -> float:
    """Negative summed cosine similarity between paired edges."""
    total = 0.0
    for pair in match.instance.pairs:
        p, g = pair
        cos, _ = _edge_cosines(
            preds[p].points, _aligned_gt(gts[g], match, pair), gts[g].kind
        )
        total -= float(cos.sum())
    return total


def total_loss(
    preds: list[PredictedElement],
    gts: list[MapElement],
    match: HierarchicalMatch,
    weights: LossWeights = LossWeights(),
    cfg: CostConfig = CostConfig(),
) -> LossBreakdown:
    cls = classification_loss(preds, gts, match, cfg)
    p2p = point2point_loss(preds, gts, match)
    dir_ = edge_direction_loss(preds, gts, match)
    total = weights.lambda_cls * cls + weights.alpha_p2p * p2p + weights.beta_dir * dir_
    return LossBreakdown(cls=cls, p2p=p2p, dir=dir_, total=total)


def loss_gradients(
    preds: list[PredictedElement],
    gts: list[MapElement],
    match: HierarchicalMatch,
    weights: LossWeights = LossWeights(),
    cfg: CostConfig = CostConfig(),
) -> LossGradients:
    """Analytic gradient of the weighted total wrt predicted points and scores.

    The assignment is frozen; the Manhattan term uses the minimum-norm
    subgradient (0 at exact coordinate ties).  No-object predictions get
    zero point gradients and only the negative-target score gradient.
    """
    n_preds = len(preds)
    if n_preds:
        n_points = len(preds[0].points)
        scores = np.stack([p.scores for p in preds])
    else:
        n_points = 0
        scores = np.zeros((0, 3))
    d_points = np.zeros((n_preds, n_points, 2))

    _, d_cls = _focal_terms(scores, _class_targets(preds, gts, match), cfg)
    d_scores = weights.lambda_cls * d_cls

    for pair in match.instance.pairs:
        p, g = pair
        aligned = _aligned_gt(gts[g], match, pair)
        d_points[p] += weights.alpha_p2p * np.sign(preds[p].points - aligned)
        _, d_dir = _edge_cosines(preds[p].points, aligned, gts[g].kind)
        d_points[p] -= weights.beta_dir * d_dir
    return LossGradients(d_points=d_points, d_scores=d_scores)
