from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import numpy as np
from scipy import ndimage, sparse

from terranalog.config import GraphConfig
from terranalog.core.enum import GeomorphFeature
from terranalog.core.graph.contours import extract_contours, sample_nodes
from terranalog.core.graph.features import (
    SegmentIndex,
    acr,
    contour_density,
    direction_entropy,
    vrm_map,
)
from terranalog.core.graph.triangulation import delaunay
from terranalog.core.raster.dem_grid import BoundingBox, DemGrid
from terranalog.exception import StageInputError

_logger = logging.getLogger(__name__)

FEATURE_COUNT = len(GeomorphFeature)


def standardize(raw: np.ndarray) -> np.ndarray:
    """Zero mean, unit variance per channel; constant channels become 0."""
    raw = np.asarray(raw, dtype=np.float64)
    mean = raw.mean(axis=0)
    std = raw.std(axis=0)
    scale = np.where(std > 1e-12, std, 1.0)
    out = (raw - mean) / scale
    out[:, std <= 1e-12] = 0.0
    return out


def _canonical_edges(edges: np.ndarray, n: int) -> np.ndarray:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size and (edges.min() < 0 or edges.max() >= n):
        raise StageInputError(f"Edge index out of range for {n} nodes.")
    edges = np.sort(edges, axis=1)
    edges = edges[edges[:, 0] != edges[:, 1]]
    return np.unique(edges, axis=0) if edges.size else edges


@dataclass(frozen=True, eq=False)
class TerrainGraph:
    """
    Contour nodes with Delaunay edges and five geomorphometric features.

    Parameters
    ----------
    positions : numpy.ndarray
        ``(N, 2)`` node ``(x, y)`` in meters.
    elevations : numpy.ndarray
        ``(N,)`` node elevation in meters.
    raw_features : numpy.ndarray
        ``(N, 5)`` VRM, ACR, Slope, CD and DSE before standardization.
    edges : numpy.ndarray
        ``(E, 2)`` undirected edges with ``i < j``.
    features : numpy.ndarray, optional
        Network inputs; the per-graph standardized raw features by default.
    """

    positions: np.ndarray
    elevations: np.ndarray
    raw_features: np.ndarray
    edges: np.ndarray
    features: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        n = len(self.elevations)
        if n < 3:
            raise StageInputError(f"A terrain graph needs at least 3 nodes, got {n}.")
        raw = np.asarray(self.raw_features, dtype=np.float64)
        if raw.shape != (n, FEATURE_COUNT):
            raise StageInputError(
                f"Expected {n}x{FEATURE_COUNT} raw features, got {raw.shape}."
            )
        if not np.all(np.isfinite(raw)):
            raise StageInputError("Terrain graph features must be finite.")
        features = standardize(raw) if self.features is None else self.features
        fields = {
            "positions": np.asarray(self.positions, dtype=np.float64).reshape(n, 2),
            "elevations": np.asarray(self.elevations, dtype=np.float64),
            "raw_features": raw,
            "edges": _canonical_edges(self.edges, n),
            "features": np.asarray(features, dtype=np.float64),
        }
        for name, value in fields.items():
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def node_count(self) -> int:
        return len(self.elevations)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        n = self.node_count
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.ones(len(rows))
        return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    @cached_property
    def laplacian(self) -> sparse.csr_matrix:
        """``I - D^-1/2 A D^-1/2``; isolated nodes keep a diagonal of 1."""
        degrees = self.degrees
        inv_sqrt = np.zeros_like(degrees)
        connected = degrees > 0
        inv_sqrt[connected] = 1.0 / np.sqrt(degrees[connected])
        scale = sparse.diags(inv_sqrt)
        normalized = scale @ self.adjacency @ scale
        return (sparse.identity(self.node_count, format="csr") - normalized).tocsr()

    def with_features_zeroed(self, features: Iterable[GeomorphFeature]) -> TerrainGraph:
        """Copy whose network inputs have the given channels set to zero."""
        values = np.array(self.features)
        for feature in features:
            values[:, GeomorphFeature(feature).channel] = 0.0
        return TerrainGraph(
            positions=self.positions,
            elevations=self.elevations,
            raw_features=self.raw_features,
            edges=self.edges,
            features=values,
        )


def _nearest_cells(grid: DemGrid, xy: np.ndarray) -> np.ndarray:
    cells = np.rint(xy[:, ::-1] / grid.cell_size).astype(np.int64)
    cells[:, 0] = np.clip(cells[:, 0], 0, grid.rows - 1)
    cells[:, 1] = np.clip(cells[:, 1], 0, grid.cols - 1)
    return cells


def _fill_from_nearest(values: np.ndarray) -> np.ndarray:
    missing = ~np.isfinite(values)
    if not missing.any() or missing.all():
        return np.nan_to_num(values)
    _, (rows, cols) = ndimage.distance_transform_edt(missing, return_indices=True)
    return values[rows, cols]


def _node_acr(grid: DemGrid, cell: np.ndarray, patch: int) -> float:
    half_lo = (patch - 1) // 2
    box = BoundingBox(
        max(int(cell[0]) - half_lo, 0),
        min(int(cell[0]) - half_lo + patch - 1, grid.rows - 1),
        max(int(cell[1]) - half_lo, 0),
        min(int(cell[1]) - half_lo + patch - 1, grid.cols - 1),
    )
    if box.rows < 2 or box.cols < 2:
        return 1.0
    valid = grid.valid_mask[
        box.row_min : box.row_max + 1, box.col_min : box.col_max + 1
    ]
    quads = valid[:-1, :-1] & valid[:-1, 1:] & valid[1:, :-1] & valid[1:, 1:]
    if not quads.any():
        return 1.0
    return acr(grid, box, footprint=quads)


def _node_slopes(xy: np.ndarray, z: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Mean incident-edge slope in degrees; edges between coincident nodes skip."""
    n = len(z)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    distance = np.hypot(*(xy[edges[:, 1]] - xy[edges[:, 0]]).T)
    edges, distance = edges[distance > 1e-9], distance[distance > 1e-9]
    if len(edges) == 0:
        return np.zeros(n)
    i, j = edges[:, 0], edges[:, 1]
    slopes = np.degrees(np.arctan2(np.abs(z[j] - z[i]), distance))
    totals = np.bincount(i, weights=slopes, minlength=n) + np.bincount(
        j, weights=slopes, minlength=n
    )
    counts = np.bincount(i, minlength=n) + np.bincount(j, minlength=n)
    return np.divide(totals, counts, out=np.zeros(n), where=counts > 0)


def build_graph(grid: DemGrid, config: Optional[GraphConfig] = None) -> TerrainGraph:
    """
    Turn a terrain raster into a feature graph.

    Nodes are sampled along the contours; edges come from their Delaunay
    triangulation. Per node, VRM is read at the nearest cell, ACR over the
    ``acr_patch`` square around it, Slope is the mean slope of its incident
    edges, and CD and DSE are measured in the radius-``r`` disk.

    Raises
    ------
    StageInputError
        If the grid yields fewer than 3 nodes.
    """
    config = config or GraphConfig()
    contours = extract_contours(grid, config.contour_interval)
    nodes = sample_nodes(contours, config.node_spacing)
    if len(nodes) < 3:
        raise StageInputError(
            f"Grid yields {len(nodes)} contour nodes, at least 3 are needed."
        )
    edges = delaunay(nodes.xy)
    cells = _nearest_cells(grid, nodes.xy)

    ruggedness = _fill_from_nearest(vrm_map(grid, config.vrm_window))
    index = SegmentIndex(contours)
    raw = np.zeros((len(nodes), FEATURE_COUNT))
    raw[:, GeomorphFeature.VRM.channel] = ruggedness[cells[:, 0], cells[:, 1]]
    raw[:, GeomorphFeature.ACR.channel] = [
        _node_acr(grid, cell, config.acr_patch) for cell in cells
    ]
    raw[:, GeomorphFeature.SLOPE.channel] = _node_slopes(nodes.xy, nodes.z, edges)
    raw[:, GeomorphFeature.CD.channel] = [
        contour_density(point, contours, config.radius, index=index)
        for point in nodes.xy
    ]
    raw[:, GeomorphFeature.DSE.channel] = [
        direction_entropy(point, contours, config.radius, config.bins, index=index)
        for point in nodes.xy
    ]
    graph = TerrainGraph(
        positions=nodes.xy, elevations=nodes.z, raw_features=raw, edges=edges
    )
    _logger.debug(
        "Built graph: %d nodes, %d edges from %d contours",
        graph.node_count,
        graph.edge_count,
        len(contours),
    )
    return graph
