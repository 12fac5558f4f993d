"""Floorplan geometry: intersections, landmarks, JSON round trip."""

import numpy as np
import pytest

from trtrack.errors import DataError, ParameterError
from trtrack.floorplan import FloorPlan, Landmark, segments_intersect


@pytest.fixture()
def square_plan():
    walls = [(0, 0, 10, 0), (10, 0, 10, 10), (10, 10, 0, 10), (0, 10, 0, 0)]
    landmarks = [Landmark((0.0, 0.0), "corner"), Landmark((5.0, 0.0), "door"),
                 Landmark((10.0, 10.0), "corner"),
                 Landmark((5.0, 10.0), "corridor_end")]
    return FloorPlan(walls=np.asarray(walls, dtype=float),
                     landmarks=landmarks, bounds=np.array([0, 0, 10, 10]))


def test_segment_intersection_cases():
    a = np.array([0.0, 0.0])
    b = np.array([2.0, 2.0])
    assert segments_intersect(a, b, np.array([0.0, 2.0]), np.array([2.0, 0.0]))
    assert not segments_intersect(a, b, np.array([3.0, 0.0]), np.array([4.0, 0.0]))
    # touching at an endpoint counts
    assert segments_intersect(a, b, np.array([2.0, 2.0]), np.array([3.0, 2.0]))
    # collinear disjoint does not
    assert not segments_intersect(a, b, np.array([3.0, 3.0]), np.array([4.0, 4.0]))


def test_segment_intersection_vectorized():
    q1 = np.array([[0.0, 2.0], [3.0, 0.0], [1.0, -1.0]])
    q2 = np.array([[2.0, 0.0], [4.0, 0.0], [1.0, 3.0]])
    hits = segments_intersect(np.zeros(2), np.array([2.0, 2.0]), q1, q2)
    assert hits.tolist() == [True, False, True]


def test_wall_crossing(square_plan):
    assert square_plan.segment_hits_wall((5.0, 5.0), (5.0, 15.0))
    assert not square_plan.segment_hits_wall((2.0, 2.0), (8.0, 8.0))


def test_empty_plan_never_hits():
    plan = FloorPlan.empty()
    assert not plan.segment_hits_wall((0, 0), (1e6, 1e6))


def test_nearest_landmark(square_plan):
    lm, d = square_plan.nearest_landmark((4.5, 0.5))
    assert lm.kind == "door"
    assert d == pytest.approx(np.hypot(0.5, 0.5))
    # corridor_end is excluded by the default kinds
    lm2, _ = square_plan.nearest_landmark((5.0, 9.9))
    assert lm2.kind != "corridor_end"


def test_landmark_validation():
    with pytest.raises(ParameterError):
        Landmark((0.0, 0.0), "window")
    with pytest.raises(ParameterError):
        FloorPlan(walls=np.empty((0, 4)),
                  landmarks=[Landmark((20.0, 0.0), "corner")],
                  bounds=np.array([0, 0, 10, 10]))


def test_degenerate_wall_rejected():
    with pytest.raises(ParameterError):
        FloorPlan(walls=np.array([[1.0, 1.0, 1.0, 1.0]]), landmarks=[],
                  bounds=np.array([0, 0, 10, 10]))


def test_json_round_trip(square_plan, tmp_path):
    path = tmp_path / "plan.json"
    square_plan.save(path)
    loaded = FloorPlan.load(path)
    assert np.array_equal(loaded.walls, square_plan.walls)
    assert np.array_equal(loaded.bounds, square_plan.bounds)
    assert [lm.kind for lm in loaded.landmarks] == \
        [lm.kind for lm in square_plan.landmarks]
    for a, b in zip(loaded.landmarks, square_plan.landmarks):
        assert np.array_equal(a.position, b.position)


def test_load_malformed(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("not json {")
    with pytest.raises(DataError):
        FloorPlan.load(p)
    p.write_text('{"walls": []}')  # missing bounds
    with pytest.raises(DataError):
        FloorPlan.load(p)
