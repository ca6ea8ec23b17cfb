from __future__ import annotations

import numpy as np

from terranalog.core.raster import DemGrid
from tests.fixture.terrain_factory import Surface, TerrainFactory

HEMISPHERE_RADIUS = 60.0
HEMISPHERE_CENTER = 63.5


class AnalyticFactory(TerrainFactory):
    def create_grid(self, surface: Surface) -> DemGrid:
        if surface is Surface.FLAT:
            return self.create_flat()
        elif surface is Surface.PLANE:
            return self.create_plane()
        elif surface is Surface.HEMISPHERE:
            return self.create_hemisphere()
        elif surface is Surface.BOWL:
            return self.create_bowl()
        raise ValueError(f"Unsupported surface: {surface}")

    def create_flat(self) -> DemGrid:
        return DemGrid(np.full((32, 32), 100.0), cell_size=30.0)

    def create_plane(self) -> DemGrid:
        rr, cc = np.mgrid[0:32, 0:48].astype(np.float64)
        return DemGrid(500.0 + 2.0 * rr - 0.5 * cc, cell_size=10.0)

    def create_hemisphere(self) -> DemGrid:
        rr, cc = np.mgrid[0:128, 0:128].astype(np.float64)
        d2 = (rr - HEMISPHERE_CENTER) ** 2 + (cc - HEMISPHERE_CENTER) ** 2
        z = np.sqrt(np.clip(HEMISPHERE_RADIUS**2 - d2, 0.0, None))
        return DemGrid(z, cell_size=1.0)

    def create_bowl(self) -> DemGrid:
        rr, cc = np.mgrid[0:64, 0:64].astype(np.float64)
        d2 = (rr - 31.5) ** 2 + (cc - 31.5) ** 2
        return DemGrid(600.0 * d2 / 32.0**2, cell_size=30.0)
