import itertools
import math

import numpy as np
import pytest

from conftest import random_element, random_prediction
from vecmap.geometry import (
    Direction,
    ElementClass,
    ElementKind,
    MapElement,
    apply_permutation,
    permutation_group,
)
from vecmap.matching import (
    CapacityError,
    CostConfig,
    PositionCost,
    PredictedElement,
    chamfer_position_cost,
    focal_class_cost,
    hierarchical_match,
    instance_match,
    manhattan_distance,
    point_level_match,
)


class TestManhattan:
    def test_unit_offsets(self):
        assert manhattan_distance((0, 0), (1, 1)) == 2.0

    def test_identity(self):
        assert manhattan_distance((3.5, -2.0), (3.5, -2.0)) == 0.0

    def test_direct(self):
        assert math.isclose(manhattan_distance((0.2, 0.7), (0.5, 0.1)), 0.9)


class TestFocalClassCost:
    def test_half_confidence_value(self):
        # independent scalar evaluation of the positive-minus-negative form
        p, gamma, alpha, eps = 0.5, 2.0, 0.25, 1e-12
        expected = alpha * (1 - p) ** gamma * -math.log(p + eps) - (
            1 - alpha
        ) * p**gamma * -math.log(1 - p + eps)
        got = focal_class_cost([0.1, 0.5, 0.2], ElementClass.DIVIDER)
        assert got == pytest.approx(expected, abs=1e-15)
        assert got == pytest.approx(-0.0866434, abs=1e-7)

    def test_confident_match_strongly_preferred(self):
        assert focal_class_cost([1.0, 0, 0], ElementClass.PED_CROSSING) < -15
        assert math.isfinite(focal_class_cost([1.0, 0, 0], ElementClass.PED_CROSSING))

    def test_zero_score_strongly_dispreferred(self):
        cost = focal_class_cost([0.0, 0, 0], ElementClass.PED_CROSSING)
        assert cost > 5 and math.isfinite(cost)


def _oracle_point_match(pred_pts, gt):
    """Exhaustive enumeration over the group, plain-python accumulation."""
    group = permutation_group(gt.kind, gt.n_points)
    best_cost, best_member = None, None
    for member in group.members:
        idx = member.index_map(gt.n_points)
        acc = 0.0
        for j in range(gt.n_points):
            g = idx[j]
            acc += abs(pred_pts[j][0] - gt.points[g][0]) + abs(
                pred_pts[j][1] - gt.points[g][1]
            )
        if best_cost is None or acc < best_cost:
            best_cost, best_member = acc, member
    return best_cost, best_member


class TestPointLevelMatch:
    def test_exact_polyline_is_forward_zero(self, rng):
        gt = random_element(rng, kind=ElementKind.POLYLINE)
        result = point_level_match(gt.points, gt)
        assert result.perm.direction is Direction.FORWARD
        assert result.perm.offset == 0
        assert result.cost == 0.0

    def test_reversed_polyline_is_reverse_zero(self, rng):
        gt = random_element(rng, kind=ElementKind.POLYLINE)
        result = point_level_match(gt.points[::-1], gt)
        assert result.perm.direction is Direction.REVERSE
        assert result.cost == 0.0

    def test_random_polygon_matches_exhaustive_enumeration(self, rng):
        for _ in range(20):
            gt = random_element(rng, kind=ElementKind.POLYGON, n_points=8)
            pred = rng.uniform(size=(8, 2))
            result = point_level_match(pred, gt)
            cost, member = _oracle_point_match(pred, gt)
            assert result.cost == cost
            assert result.perm == member

    def test_cost_invariant_under_gt_reordering(self, rng):
        gt = random_element(rng, kind=ElementKind.POLYGON, n_points=9)
        pred = rng.uniform(size=(9, 2))
        base = point_level_match(pred, gt).cost
        for member in gt.group().members:
            reordered = MapElement(
                gt.element_class, gt.kind, apply_permutation(gt.points, member)
            )
            assert point_level_match(pred, reordered).cost == base

    def test_zero_cost_iff_reordering(self, rng):
        gt = random_element(rng, kind=ElementKind.POLYGON, n_points=6)
        shifted = apply_permutation(gt.points, gt.group().members[3])
        assert point_level_match(shifted, gt).cost == 0.0
        assert point_level_match(shifted + 0.01, gt).cost > 0.0

    def test_length_mismatch_rejected(self, rng):
        gt = random_element(rng, n_points=10)
        with pytest.raises(ValueError):
            point_level_match(rng.uniform(size=(9, 2)), gt)


class TestChamferPositionCost:
    def test_identical_sets(self, rng):
        pts = rng.uniform(size=(12, 2))
        assert chamfer_position_cost(pts, pts.copy()) == 0.0

    def test_single_pair_euclidean(self):
        assert chamfer_position_cost([[0, 0]], [[3, 4]]) == pytest.approx(5.0)

    def test_two_vs_one(self):
        got = chamfer_position_cost([[0, 0], [1, 0]], [[0, 1]])
        expected = 0.5 * ((1 + math.sqrt(2)) / 2 + 1)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_symmetric(self, rng):
        a, b = rng.uniform(size=(8, 2)), rng.uniform(size=(5, 2))
        assert chamfer_position_cost(a, b) == chamfer_position_cost(b, a)

    def test_translation_invariant(self, rng):
        a, b = rng.uniform(size=(6, 2)), rng.uniform(size=(6, 2))
        shift = np.array([1.7, -0.3])
        assert chamfer_position_cost(a + shift, b + shift) == pytest.approx(
            chamfer_position_cost(a, b), abs=1e-12
        )


def _pair_cost(pred, gt, cfg):
    cost = focal_class_cost(pred.scores, gt.element_class, cfg)
    if cfg.position_cost is PositionCost.CHAMFER:
        return cost + chamfer_position_cost(pred.points, gt.points)
    return cost + _oracle_point_match(pred.points, gt)[0]


def _oracle_instance_match(preds, gts, cfg):
    """Brute force over all injections of ground truths into predictions."""
    best_cost, best_pairs = None, None
    for combo in itertools.permutations(range(len(preds)), len(gts)):
        total = sum(_pair_cost(preds[p], gts[g], cfg) for g, p in enumerate(combo))
        if best_cost is None or total < best_cost:
            best_cost = total
            best_pairs = sorted((p, g) for g, p in enumerate(combo))
    return best_cost, best_pairs


class TestInstanceMatch:
    def test_singleton(self, rng):
        gt = random_element(rng)
        pred = PredictedElement(
            scores=np.eye(3)[int(gt.element_class)] * 0.99, points=gt.points
        )
        assert instance_match([pred], [gt]).pairs == ((0, 0),)

    def test_diagonal_dominance(self, rng):
        gts = [random_element(rng) for _ in range(4)]
        preds = [
            PredictedElement(scores=np.eye(3)[int(g.element_class)] * 0.95, points=g.points)
            for g in gts
        ]
        assert instance_match(preds, gts).pairs == ((0, 0), (1, 1), (2, 2), (3, 3))

    @pytest.mark.parametrize("position_cost", list(PositionCost))
    def test_random_matches_brute_force(self, rng, position_cost):
        cfg = CostConfig(position_cost=position_cost)
        for _ in range(5):
            preds = [random_prediction(rng, n_points=8) for _ in range(5)]
            gts = [random_element(rng, n_points=8) for _ in range(4)]
            got = instance_match(preds, gts, cfg)
            oracle_cost, oracle_pairs = _oracle_instance_match(preds, gts, cfg)
            total = sum(_pair_cost(preds[p], gts[g], cfg) for p, g in got.pairs)
            assert total == pytest.approx(oracle_cost, rel=1e-12)
            assert list(got.pairs) == oracle_pairs

    def test_capacity_error(self, rng):
        with pytest.raises(CapacityError):
            instance_match([random_prediction(rng)], [random_element(rng)] * 2)


class TestHierarchicalMatch:
    def test_empty_gt(self, rng):
        match = hierarchical_match([random_prediction(rng)], [])
        assert match.instance.pairs == ()
        assert match.point_level == {}

    def test_perfect_predictions(self, rng):
        gts = [random_element(rng) for _ in range(3)]
        preds = [
            PredictedElement(scores=np.eye(3)[int(g.element_class)], points=g.points)
            for g in gts
        ]
        match = hierarchical_match(preds, gts)
        assert match.instance.pairs == ((0, 0), (1, 1), (2, 2))
        for pa in match.point_level.values():
            assert pa.cost == 0.0

    def test_joint_brute_force(self, rng):
        cfg = CostConfig()
        preds = [random_prediction(rng, n_points=6) for _ in range(6)]
        gts = [random_element(rng, n_points=6) for _ in range(4)]
        match = hierarchical_match(preds, gts, cfg)
        oracle_cost, oracle_pairs = _oracle_instance_match(preds, gts, cfg)
        assert list(match.instance.pairs) == oracle_pairs
        for pair, pa in match.point_level.items():
            cost, member = _oracle_point_match(preds[pair[0]].points, gts[pair[1]])
            assert pa.cost == cost
            assert pa.perm == member

    def test_fixed_order_forces_identity_perm(self, rng):
        gts = [random_element(rng, kind=ElementKind.POLYGON)]
        preds = [
            PredictedElement(scores=np.array([0.9, 0.0, 0.0]), points=gts[0].points)
        ]
        match = hierarchical_match(preds, gts, fixed_order=True)
        pa = match.point_level[(0, 0)]
        assert pa.perm.direction is Direction.FORWARD and pa.perm.offset == 0

    def test_deterministic(self, rng):
        preds = [random_prediction(rng) for _ in range(6)]
        gts = [random_element(rng) for _ in range(3)]
        assert hierarchical_match(preds, gts) == hierarchical_match(preds, gts)


class TestTranslationInvariance:
    def test_point_cost_translation_invariant(self, rng):
        gt = random_element(rng, n_points=7)
        pred = rng.uniform(size=(7, 2))
        shift = np.array([0.25, -0.1])
        shifted_gt = MapElement(gt.element_class, gt.kind, gt.points + shift)
        assert point_level_match(pred + shift, shifted_gt).cost == pytest.approx(
            point_level_match(pred, gt).cost, abs=1e-12
        )
