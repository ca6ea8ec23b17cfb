from .contours import ContourSet, NodeSample, extract_contours, sample_nodes
from .features import (
    acr,
    contour_density,
    direction_entropy,
    slope_between,
    unit_normals,
    vrm,
    vrm_map,
)
from .graph_io import read_graph, write_graph
from .terrain_graph import TerrainGraph, build_graph, standardize
from .triangulation import delaunay, delaunay_triangles
