from .ascii_grid import load_ascii_grid, write_ascii_grid
from .binary_format import (
    read_binary_grid,
    read_binary_matrix,
    write_binary_grid,
    write_binary_matrix,
)
from .dem_grid import METERS_PER_DEGREE, BoundingBox, DemGrid, crop
from .mosaic import build_tiles, mosaic_tiles
from .synth import PlantedDepression, PlantedValley, SynthSpec, synth_terrain
