import numpy as np
import pytest

from terranalog.core.raster import DemGrid
from terranalog.core.ssc import ledb_binarize, local_mean
from terranalog.exception import StageInputError
from tests.fixture.terrain_factory import Surface, TerrainSource


def _pit(center=0.0, nodata_mask=None):
    values = np.full((5, 5), 100.0)
    values[2, 2] = center
    return DemGrid(values, cell_size=30.0, nodata_mask=nodata_mask)


def test_pit_sets_only_the_center():
    mask = ledb_binarize(_pit(), blk=5, c=50.0)

    assert mask.shape == (5, 5)
    assert mask.count == 1
    assert mask.bits[2, 2]


def test_threshold_is_strict():
    # the center counts toward its own window mean
    assert ledb_binarize(_pit(center=48.0), blk=5, c=50.0).count == 0
    assert ledb_binarize(_pit(center=47.0), blk=5, c=50.0).count == 1


def test_flat_tile_sets_nothing(terrain_fixture):
    grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.FLAT)
    assert ledb_binarize(grid, blk=15, c=1.0).count == 0


def test_nodata_is_never_set_and_never_averaged():
    mask = np.zeros((5, 5), dtype=bool)
    mask[2, 2] = True
    grid = _pit(nodata_mask=mask)

    assert ledb_binarize(grid, blk=5, c=50.0).count == 0
    np.testing.assert_allclose(local_mean(grid, 5), 100.0)


def test_local_mean_truncates_at_edges():
    values = np.arange(9, dtype=np.float64).reshape(3, 3)
    means = local_mean(DemGrid(values, cell_size=1.0), 3)

    assert means[1, 1] == pytest.approx(4.0)
    assert means[0, 0] == pytest.approx((0 + 1 + 3 + 4) / 4)


def test_valley_floor_is_set(terrain_fixture):
    grid = terrain_fixture(TerrainSource.SYNTHETIC, Surface.VALLEY)
    mask = ledb_binarize(grid, blk=15, c=20.0)

    assert mask.bits[64, 64]
    assert not mask.bits[20, 64]


# test cases for invalid parameters
@pytest.mark.parametrize("blk", [1, 4, 32])
def test_reject_bad_window(blk):
    with pytest.raises(StageInputError) as e:
        ledb_binarize(_pit(), blk=blk)
    assert f"Window size must be odd and at least 3, got {blk}." == str(e.value)


@pytest.mark.parametrize("c", [0.0, -5.0])
def test_reject_non_positive_threshold(c):
    with pytest.raises(StageInputError) as e:
        ledb_binarize(_pit(), blk=5, c=c)
    assert f"Deficit threshold must be positive, got {c}." == str(e.value)
