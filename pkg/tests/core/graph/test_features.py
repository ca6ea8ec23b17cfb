import math

import numpy as np
import pytest

from terranalog.core.graph import (
    ContourSet,
    acr,
    contour_density,
    direction_entropy,
    slope_between,
    unit_normals,
    vrm,
    vrm_map,
)
from terranalog.core.raster import BoundingBox, DemGrid
from terranalog.exception import ExtentError, StageInputError
from tests.fixture.analytic_factory import HEMISPHERE_CENTER, HEMISPHERE_RADIUS
from tests.fixture.terrain_factory import Surface, TerrainSource


def _segments(angles, length=100.0):
    lines = []
    for theta in angles:
        half = 0.5 * length * np.array([math.cos(theta), math.sin(theta)])
        lines.append(np.array([-half, half]))
    return ContourSet(100.0, lines, [0.0] * len(lines))


class TestVrm:
    def test_plane_is_smooth(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.PLANE)
        assert vrm(grid, (10, 10)) == 0.0
        assert np.all(vrm_map(grid) == 0.0)

    def test_bowl_is_rugged(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.BOWL)
        assert vrm(grid, (32, 32), window=5) > 0.0

    def test_map_matches_point_value(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.BOWL)
        assert vrm_map(grid)[20, 40] == pytest.approx(vrm(grid, (20, 40)))

    def test_map_marks_nodata(self):
        mask = np.zeros((5, 5), dtype=bool)
        mask[2, 2] = True
        grid = DemGrid(np.zeros((5, 5)), cell_size=1.0, nodata_mask=mask)
        assert np.isnan(vrm_map(grid)[2, 2])

    def test_normals_are_unit(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.BOWL)
        np.testing.assert_allclose(np.linalg.norm(unit_normals(grid), axis=-1), 1.0)

    @pytest.mark.parametrize("window", [1, 4])
    def test_reject_bad_window(self, window):
        with pytest.raises(StageInputError):
            vrm(DemGrid(np.zeros((9, 9)), cell_size=1.0), (4, 4), window=window)

    def test_reject_window_outside_grid(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.PLANE)
        with pytest.raises(ExtentError) as e:
            vrm(grid, (0, 5))
        assert "VRM window at (0, 5) leaves the 32x48 grid." == str(e.value)

    def test_reject_nodata_window(self):
        grid = DemGrid(np.full((5, 5), -9999.0), cell_size=1.0)
        with pytest.raises(StageInputError):
            vrm(grid, (2, 2))


class TestAcr:
    def test_flat_patch_is_one(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.FLAT)
        assert acr(grid, BoundingBox(0, 9, 0, 9)) == pytest.approx(1.0)

    def test_tilted_plane_is_one(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.PLANE)
        assert acr(grid, BoundingBox(3, 20, 5, 30)) == pytest.approx(1.0, abs=1e-9)

    def test_hemisphere_doubles_its_footprint(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.HEMISPHERE)
        rr, cc = np.mgrid[0:128, 0:128]
        inside = np.hypot(rr - HEMISPHERE_CENTER, cc - HEMISPHERE_CENTER)
        inside = inside < HEMISPHERE_RADIUS
        quads = inside[:-1, :-1] | inside[:-1, 1:] | inside[1:, :-1] | inside[1:, 1:]

        value = acr(grid, BoundingBox(0, 127, 0, 127), footprint=quads)
        assert value == pytest.approx(2.0, rel=0.05)

    def test_reject_footprint_shape(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.FLAT)
        with pytest.raises(StageInputError) as e:
            acr(grid, BoundingBox(0, 4, 0, 4), footprint=np.ones((5, 5)))
        assert "Footprint shape (5, 5) does not match quads (4, 4)." == str(e.value)

    def test_reject_patch_outside_grid(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.FLAT)
        with pytest.raises(ExtentError):
            acr(grid, BoundingBox(20, 40, 0, 5))

    def test_reject_single_cell(self, terrain_fixture):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.FLAT)
        with pytest.raises(StageInputError):
            acr(grid, BoundingBox(3, 3, 0, 5))


class TestSlope:
    def test_forty_five_degrees(self):
        assert slope_between((0, 0, 0), (60, 80, 100)) == pytest.approx(45.0)

    def test_downhill_is_positive(self):
        assert slope_between((0, 0, 100), (100, 0, 0)) == pytest.approx(45.0)

    def test_reject_coincident_nodes(self):
        with pytest.raises(StageInputError) as e:
            slope_between((5, 5, 0), (5, 5, 10))
        assert "Slope is undefined between coincident nodes." == str(e.value)


class TestContourDensity:
    def test_chord_through_center(self):
        line = np.array([[-1000.0, 0.0], [1000.0, 0.0]])
        contours = ContourSet(100.0, [line], [0.0])
        expected = 2.0 / (math.pi * 500.0)
        assert contour_density((0.0, 0.0), contours, r=500.0) == pytest.approx(expected)

    def test_far_contour_does_not_count(self):
        line = np.array([[-1000.0, 900.0], [1000.0, 900.0]])
        assert contour_density((0.0, 0.0), ContourSet(100.0, [line], [0.0])) == 0.0

    def test_reject_bad_radius(self):
        with pytest.raises(StageInputError):
            contour_density((0.0, 0.0), ContourSet(100.0), r=0.0)


class TestDirectionEntropy:
    def test_uniform_directions(self):
        angles = (np.arange(36) + 0.5) * math.pi / 36
        entropy = direction_entropy((0.0, 0.0), _segments(angles), r=500.0)
        assert entropy == pytest.approx(math.log(36))

    def test_two_perpendicular_directions(self):
        contours = _segments([0.0, math.pi / 2])
        assert direction_entropy((0.0, 0.0), contours) == pytest.approx(math.log(2))

    def test_one_direction(self):
        contours = _segments([0.3, 0.3 + math.pi])
        assert direction_entropy((0.0, 0.0), contours) == pytest.approx(0.0)

    def test_empty_disk(self):
        assert direction_entropy((0.0, 0.0), ContourSet(100.0)) == 0.0

    def test_reject_single_bin(self):
        with pytest.raises(StageInputError) as e:
            direction_entropy((0.0, 0.0), ContourSet(100.0), bins=1)
        assert "Entropy needs at least 2 bins, got 1." == str(e.value)
