import dataclasses
import math

import numpy as np
import pytest

from terranalog.core.raster import DemGrid
from terranalog.core.ssc import LineFit, ValleyCandidate
from terranalog.util.dedup_utils import deduplicate_candidates
from terranalog.util.geometry import (
    box_iou,
    clip_segments_to_disk,
    perpendicular_distance,
)


def test_perpendicular_distance():
    points = np.array([[0.0, 5.0], [3.0, 1.0], [-2.0, 9.0]])
    distances = perpendicular_distance(points, np.zeros(2), np.array([0.0, 1.0]))
    np.testing.assert_allclose(distances, [0.0, 3.0, 2.0])


def test_perpendicular_distance_to_a_point():
    points = np.array([[3.0, 4.0]])
    assert perpendicular_distance(points, np.zeros(2), np.zeros(2))[0] == 5.0


class TestClipSegmentsToDisk:
    def test_chord_through_center(self):
        lengths, azimuths = clip_segments_to_disk(
            np.array([[-1000.0, 0.0]]), np.array([[1000.0, 0.0]]), np.zeros(2), 500.0
        )
        assert lengths[0] == pytest.approx(1000.0)
        assert azimuths[0] == pytest.approx(0.0)

    def test_segment_inside_and_outside(self):
        starts = np.array([[0.0, 0.0], [600.0, 600.0]])
        ends = np.array([[0.0, 100.0], [700.0, 600.0]])
        lengths, _ = clip_segments_to_disk(starts, ends, np.zeros(2), 500.0)
        np.testing.assert_allclose(lengths, [100.0, 0.0])

    def test_azimuth_is_undirected(self):
        starts = np.array([[0.0, 0.0], [0.0, 0.0]])
        ends = np.array([[1.0, 1.0], [-1.0, -1.0]])
        _, azimuths = clip_segments_to_disk(starts, ends, np.zeros(2), 10.0)
        np.testing.assert_allclose(azimuths, [math.pi / 4] * 2)


@pytest.mark.parametrize(
    "second, expected",
    [
        ((0.0, 0.0, 2.0, 2.0), 1.0),
        ((1.0, 0.0, 3.0, 2.0), 2.0 / 6.0),
        ((5.0, 5.0, 6.0, 6.0), 0.0),
    ],
)
def test_box_iou(second, expected):
    assert box_iou((0.0, 0.0, 2.0, 2.0), second) == pytest.approx(expected)


def _candidate(id, origin, mse=0.0):
    grid = DemGrid(np.zeros((10, 10)), cell_size=30.0, origin=origin)
    fit = LineFit.through((5.0, 0.0), (5.0, 9.0))
    fit = dataclasses.replace(fit, mse=mse)
    return ValleyCandidate.from_grid(id, grid, fit)


class TestDeduplicate:
    def test_lower_error_wins(self):
        worse = _candidate("a", (0.0, 300.0), mse=1.0)
        better = _candidate("b", (30.0, 300.0), mse=0.5)
        assert deduplicate_candidates([worse, better], iou=0.8) == [better]

    def test_ties_break_by_id(self):
        first = _candidate("b", (0.0, 300.0))
        second = _candidate("a", (0.0, 300.0))
        assert deduplicate_candidates([first, second]) == [second]

    def test_survivors_keep_input_order(self):
        cands = [_candidate("z", (0.0, 300.0)), _candidate("a", (3000.0, 300.0))]
        assert deduplicate_candidates(cands) == cands
