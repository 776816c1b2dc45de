import numpy as np
import pytest

from vecmap.geometry import ElementClass, ElementKind, KIND_FOR_CLASS, MapElement
from vecmap.matching import PredictedElement

CLASS_FOR_KIND = {
    ElementKind.POLYGON: ElementClass.PED_CROSSING,
    ElementKind.POLYLINE: ElementClass.DIVIDER,
}


def random_element(rng, kind=None, n_points=20, element_class=None):
    """Random classed point set in the unit square (no arc-uniformity needed)."""
    if element_class is None:
        if kind is None:
            element_class = ElementClass(int(rng.integers(3)))
        else:
            element_class = CLASS_FOR_KIND[kind]
    kind = KIND_FOR_CLASS[element_class]
    pts = rng.uniform(0.0, 1.0, size=(n_points, 2))
    return MapElement(element_class, kind, pts)


def random_prediction(rng, n_points=20, score_lo=0.05, score_hi=0.95):
    return PredictedElement(
        scores=rng.uniform(score_lo, score_hi, size=3),
        points=rng.uniform(0.0, 1.0, size=(n_points, 2)),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
