import numpy as np
import pytest

from terranalog.core.raster import DemGrid, PlantedValley, SynthSpec, synth_terrain
from terranalog.core.raster.reference import reference_candidate
from terranalog.core.twc import SliceSequence, slice_decompose
from terranalog.exception import StageInputError


def _valley_grid(nodata_mask=None):
    spec = SynthSpec(
        size=(41, 100),
        valleys=(PlantedValley((20.0, 0.0), (20.0, 99.0), depth=300.0, width=900.0),),
    )
    grid = synth_terrain(spec)
    if nodata_mask is None:
        return grid
    return DemGrid(grid.elevations, cell_size=grid.cell_size, nodata_mask=nodata_mask)


class TestSliceSequence:
    def test_scalars_become_one_point_slices(self):
        seq = SliceSequence.from_values([0.0, 1.0, 4.0])
        assert seq.slices.shape == (3, 1)
        assert seq.slice_width == 1

    def test_reject_width_mismatch(self):
        with pytest.raises(StageInputError) as e:
            SliceSequence(np.zeros((4, 5)), slice_width=6, along_spacing=30.0)
        assert "Slices have 5 points, expected 6." == str(e.value)

    def test_reversed(self):
        seq = SliceSequence.from_values([[1, 2], [3, 4], [5, 6]])
        np.testing.assert_array_equal(seq.reversed().slices, [[5, 6], [3, 4], [1, 2]])


def test_one_slice_per_cell_along_the_axis():
    seq = slice_decompose(reference_candidate(_valley_grid()), width=38)

    assert len(seq) == 100
    assert seq.slice_width == 38
    assert seq.along_spacing == 30.0
    # the axis runs down the valley floor, so every slice is symmetric
    np.testing.assert_allclose(seq.slices, seq.slices[:, ::-1], atol=1e-9)
    assert np.all(seq.slices[:, 0] > seq.slices[:, 19])


def test_spacing_in_meters():
    seq = slice_decompose(reference_candidate(_valley_grid()), width=20, spacing=60.0)
    assert len(seq) == 50
    assert seq.along_spacing == 60.0


def test_cross_length_limits_the_slice():
    candidate = reference_candidate(_valley_grid())
    narrow = slice_decompose(candidate, width=5, cross_length=120.0)
    # samples fall at -2, -1, 0, 1 and 2 cells from the floor
    np.testing.assert_allclose(
        narrow.slices[10], [-300 * (1 - k / 15) for k in (2, 1, 0, 1, 2)]
    )


def test_slices_touching_nodata_are_dropped():
    mask = np.zeros((41, 100), dtype=bool)
    mask[:, 50] = True
    seq = slice_decompose(reference_candidate(_valley_grid(mask)), width=10)
    assert len(seq) == 99


# test cases for unusable candidates
def test_reject_narrow_width():
    with pytest.raises(StageInputError) as e:
        slice_decompose(reference_candidate(_valley_grid()), width=2)
    assert "Slice width must be at least 3, got 2." == str(e.value)


def test_reject_all_nodata():
    grid = _valley_grid(np.ones((41, 100), dtype=bool))
    with pytest.raises(StageInputError) as e:
        slice_decompose(reference_candidate(grid, id="void"))
    assert "Candidate void has no usable slices." == str(e.value)
