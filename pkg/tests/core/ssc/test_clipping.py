import numpy as np
import pytest

from terranalog.core.raster import BoundingBox, DemGrid
from terranalog.core.ssc import Skeleton, select_and_clip
from terranalog.exception import StageInputError


def _tile():
    values = np.arange(60 * 80, dtype=np.float64).reshape(60, 80)
    return DemGrid(values, cell_size=30.0, origin=(0.0, 1800.0))


def _row_skeleton(row, col_start, col_stop, component_id=0):
    pixels = np.array([[row, c] for c in range(col_start, col_stop)])
    return Skeleton(pixels, component_id)


def test_accepted_skeleton_is_clipped_with_margin():
    tile = _tile()
    skeleton = _row_skeleton(30, 20, 60, 3)
    candidates = select_and_clip(
        tile, [skeleton], s_l=10, s_u=100, margin=5, tile_id="r0c0"
    )

    assert len(candidates) == 1
    candidate = candidates[0]
    assert candidate.id == "r0c0-00003"
    assert candidate.source_tile == "r0c0"
    assert candidate.box == BoundingBox(25, 35, 15, 64)
    assert candidate.raster == tile.crop(candidate.box)
    assert candidate.fit.length == pytest.approx(39.0)


def test_margin_is_clamped_at_tile_edge():
    candidates = select_and_clip(
        _tile(), [_row_skeleton(2, 0, 40)], s_l=10, s_u=100, margin=5
    )
    assert candidates[0].box == BoundingBox(0, 7, 0, 44)


@pytest.mark.parametrize(
    "col_stop, accepted",
    [(15, False), (16, True), (56, True), (57, False)],
)
def test_length_bounds_are_inclusive(col_stop, accepted):
    # a skeleton over columns 5..col_stop-1 fits a length of col_stop - 6
    candidates = select_and_clip(
        _tile(), [_row_skeleton(30, 5, col_stop)], s_l=10, s_u=50, margin=0
    )
    assert bool(candidates) is accepted


def test_curved_skeleton_is_rejected():
    cols = np.arange(0, 40)
    rows = 30 + np.rint(10 * np.sin(cols / 6.0)).astype(int)
    skeleton = Skeleton(np.column_stack([rows, cols]), 0)

    assert select_and_clip(_tile(), [skeleton], err=2.0, s_l=10, s_u=100) == []


def test_single_pixels_are_skipped():
    skeletons = [Skeleton(np.array([[5, 5]]), 0), _row_skeleton(30, 20, 60, 1)]
    candidates = select_and_clip(_tile(), skeletons, s_l=10, s_u=100)
    assert [c.id for c in candidates] == ["tile-00001"]


def test_duplicates_dropped_when_asked():
    skeletons = [_row_skeleton(30, 20, 60, 0), _row_skeleton(31, 20, 60, 1)]
    kept = select_and_clip(_tile(), skeletons, s_l=10, s_u=100, dedup_iou=0.8)
    assert len(kept) == 1


def test_reject_inverted_length_bounds():
    with pytest.raises(StageInputError) as e:
        select_and_clip(_tile(), [], s_l=200.0, s_u=100.0)
    assert "Length bounds are inverted: 200.0 > 100.0." == str(e.value)
