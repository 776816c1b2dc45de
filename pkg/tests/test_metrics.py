import numpy as np
import pytest

from vecmap.geometry import (
    ElementClass,
    ElementKind,
    MapElement,
    SceneRange,
    normalize,
)
from vecmap.matching import PredictedElement
from vecmap.metrics import APConfig, chamfer_distance, evaluate_ap
from vecmap.scenegen import PerturbSpec, SceneSpec, generate_scene, perturb


class TestChamferDistance:
    def test_identical_sets(self, rng):
        pts = rng.uniform(size=(15, 2)) * 10
        assert chamfer_distance(pts, pts.copy()) == 0.0

    def test_single_pair(self):
        assert chamfer_distance([[0, 0]], [[0, 2]]) == pytest.approx(2.0)

    def test_parallel_segments(self):
        a = np.column_stack([np.zeros(20), np.linspace(0, 10, 20)])
        b = a + [0.4, 0.0]
        assert chamfer_distance(a, b) == pytest.approx(0.4, abs=1e-12)

    def test_symmetric(self, rng):
        a, b = rng.uniform(size=(9, 2)), rng.uniform(size=(4, 2))
        assert chamfer_distance(a, b) == chamfer_distance(b, a)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            chamfer_distance(np.empty((0, 2)), [[0, 0]])


def _divider(points):
    return MapElement(ElementClass.DIVIDER, ElementKind.POLYLINE, points)


def _scored(points_metric, score, cls=ElementClass.DIVIDER, sr=SceneRange()):
    scores = np.zeros(3)
    scores[int(cls)] = score
    return PredictedElement(scores=scores, points=normalize(points_metric, sr))


def _full_scene(seed=3):
    scene = generate_scene(SceneSpec(seed=seed))
    preds = perturb(scene, PerturbSpec(seed=seed))
    return [preds], [list(scene.elements)], scene.range


class TestEvaluateAP:
    def test_perfect_detector(self):
        pred_scenes, gt_scenes, sr = _full_scene()
        report = evaluate_ap(pred_scenes, gt_scenes, APConfig(), sr)
        assert report.mean_ap == 1.0
        assert all(ap == 1.0 for ap in report.per_class_per_threshold.values())

    def test_no_predictions(self):
        _, gt_scenes, sr = _full_scene()
        report = evaluate_ap([[]], gt_scenes, APConfig(), sr)
        assert report.mean_ap == 0.0

    def test_two_divider_fixture(self):
        # hand-built PR curve: TP at rank 1, FP (2 m off) at rank 2, 2 GT
        # -> precision 1 up to recall 0.5, so 101-point AP = 51/101
        sr = SceneRange()
        gt1 = np.column_stack([np.full(20, -3.0), np.linspace(-20, 20, 20)])
        gt2 = np.column_stack([np.full(20, 6.0), np.linspace(-20, 20, 20)])
        gts = [[_divider(gt1), _divider(gt2)]]
        preds = [[_scored(gt1, 0.9), _scored(gt2 + [2.0, 0.0], 0.8)]]
        report = evaluate_ap(preds, gts, APConfig(), sr)
        for tau in (0.5, 1.0, 1.5):
            assert report.per_class_per_threshold[
                (ElementClass.DIVIDER, tau)
            ] == pytest.approx(51 / 101, abs=1e-9)

    def test_scene_count_mismatch_rejected(self):
        with pytest.raises(ValueError):
            evaluate_ap([[]], [[], []])

    def test_score_scaling_invariance(self):
        pred_scenes, gt_scenes, sr = _full_scene()
        preds = perturb(
            generate_scene(SceneSpec(seed=3)),
            PerturbSpec(seed=9, point_noise_sigma=0.3, score_model="noisy_confidence"),
        )
        base = evaluate_ap([preds], gt_scenes, APConfig(), sr)
        scaled = [
            PredictedElement(scores=p.scores * [1.0, 0.35, 1.0], points=p.points)
            for p in preds
        ]
        report = evaluate_ap([scaled], gt_scenes, APConfig(), sr)
        assert report.per_class_ap[ElementClass.DIVIDER] == pytest.approx(
            base.per_class_ap[ElementClass.DIVIDER], abs=1e-12
        )

    @pytest.mark.parametrize("seed", [0, 5, 11])
    def test_threshold_monotonicity(self, seed):
        scene = generate_scene(SceneSpec(seed=seed))
        preds = perturb(
            scene,
            PerturbSpec(
                seed=seed,
                point_noise_sigma=0.4,
                false_positive_count=3,
                score_model="noisy_confidence",
            ),
        )
        report = evaluate_ap([preds], [list(scene.elements)], APConfig(), scene.range)
        for cls in ElementClass:
            aps = [report.per_class_per_threshold[(cls, t)] for t in (0.5, 1.0, 1.5)]
            assert aps[0] <= aps[1] <= aps[2]

    def test_low_score_false_positive_never_helps(self):
        sr = SceneRange()
        gt = np.column_stack([np.zeros(20), np.linspace(-20, 20, 20)])
        gts = [[_divider(gt)]]
        preds = [[_scored(gt, 0.9)]]
        base = evaluate_ap(preds, gts, APConfig(), sr).mean_ap
        with_fp = [[_scored(gt, 0.9), _scored(gt + [10.0, 0.0], 0.2)]]
        assert evaluate_ap(with_fp, gts, APConfig(), sr).mean_ap <= base

    def test_scene_order_invariance(self):
        s1 = generate_scene(SceneSpec(seed=1))
        s2 = generate_scene(SceneSpec(seed=2, n_ped=1, n_divider=2, n_boundary=1))
        p1 = perturb(s1, PerturbSpec(seed=1, point_noise_sigma=0.3))
        p2 = perturb(s2, PerturbSpec(seed=2, point_noise_sigma=0.3))
        fwd = evaluate_ap(
            [p1, p2], [list(s1.elements), list(s2.elements)], APConfig(), s1.range
        )
        rev = evaluate_ap(
            [p2, p1], [list(s2.elements), list(s1.elements)], APConfig(), s1.range
        )
        assert fwd.mean_ap == pytest.approx(rev.mean_ap, abs=1e-12)

    def test_invalid_thresholds_rejected(self):
        with pytest.raises(ValueError):
            APConfig(thresholds=(1.0, 0.5))
