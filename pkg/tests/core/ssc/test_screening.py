import numpy as np

from terranalog.core.ssc import screen_tile, screen_tiles
from tests.fixture.synthetic_factory import SMALL_TILE_SSC, VALLEY_ROWS
from tests.fixture.terrain_factory import Surface, TerrainSource


def test_planted_valleys_are_found(terrain_fixture):
    grid = terrain_fixture(TerrainSource.SYNTHETIC, Surface.VALLEYS)
    candidates = screen_tile(grid, "t0", SMALL_TILE_SSC)

    assert len(candidates) == len(VALLEY_ROWS)
    rows = sorted(c.fit.centroid[0] for c in candidates)
    np.testing.assert_allclose(rows, VALLEY_ROWS, atol=1.5)
    for candidate in candidates:
        assert candidate.id.startswith("t0-")
        assert abs(candidate.fit.direction[0]) < 0.05
        assert candidate.fit.mse <= SMALL_TILE_SSC.err


def test_flat_tile_yields_nothing(terrain_fixture):
    grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.FLAT)
    assert screen_tile(grid, "flat", SMALL_TILE_SSC) == []


def test_result_does_not_depend_on_workers(terrain_fixture):
    tiles = [
        ("a", terrain_fixture(TerrainSource.SYNTHETIC, Surface.VALLEYS)),
        ("b", terrain_fixture(TerrainSource.SYNTHETIC, Surface.VALLEY)),
    ]
    serial = screen_tiles(tiles, SMALL_TILE_SSC, workers=1)
    threaded = screen_tiles(tiles, SMALL_TILE_SSC, workers=2)

    assert [c.id for c in serial] == [c.id for c in threaded]
    assert [c.id[0] for c in serial] == sorted(c.id[0] for c in serial)


def test_same_footprint_across_tiles_is_kept_once(terrain_fixture):
    grid = terrain_fixture(TerrainSource.SYNTHETIC, Surface.VALLEY)
    candidates = screen_tiles([("a", grid), ("b", grid)], SMALL_TILE_SSC)

    assert len(candidates) == 1
    assert candidates[0].source_tile == "a"


def test_stage_is_timed(terrain_fixture, stage_timer):
    grid = terrain_fixture(TerrainSource.SYNTHETIC, Surface.VALLEY)
    screen_tiles([("a", grid)], SMALL_TILE_SSC)
    assert list(stage_timer.to_dict()) == ["ssc"]
