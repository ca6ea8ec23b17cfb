from __future__ import annotations

from terranalog.config import SscConfig
from terranalog.core.raster import DemGrid, PlantedValley, SynthSpec, synth_terrain
from tests.fixture.terrain_factory import Surface, TerrainFactory

# Screening settings scaled down to 128-pixel test tiles.
SMALL_TILE_SSC = SscConfig(blk=15, c=20.0, err=2.0, s_l=20.0, s_u=400.0, margin=10)

VALLEY_SPEC = SynthSpec(
    size=128,
    valleys=(PlantedValley((64.0, 10.0), (64.0, 117.0), depth=300.0, width=1200.0),),
)

VALLEYS_SPEC = SynthSpec(
    size=128,
    valleys=(
        PlantedValley((22.0, 10.0), (22.0, 117.0), depth=200.0, width=900.0),
        PlantedValley((62.0, 10.0), (62.0, 117.0), depth=300.0, width=1200.0),
        PlantedValley((106.0, 10.0), (106.0, 117.0), depth=400.0, width=1350.0),
    ),
)
VALLEY_ROWS = (22.0, 62.0, 106.0)

ROUGH_VALLEY_SPEC = SynthSpec(
    size=(41, 100),
    roughness=30.0,
    valleys=(PlantedValley((20.0, 2.0), (20.0, 97.0), depth=300.0, width=1200.0),),
)


class SyntheticFactory(TerrainFactory):
    def __init__(self, seed: int = 0):
        self.seed = seed

    def create_grid(self, surface: Surface) -> DemGrid:
        if surface is Surface.FLAT:
            return synth_terrain(SynthSpec(size=64), self.seed)
        elif surface is Surface.VALLEY:
            return synth_terrain(VALLEY_SPEC, self.seed)
        elif surface is Surface.VALLEYS:
            return synth_terrain(VALLEYS_SPEC, self.seed)
        elif surface is Surface.ROUGH_VALLEY:
            return synth_terrain(ROUGH_VALLEY_SPEC, self.seed)
        raise ValueError(f"Unsupported surface: {surface}")
