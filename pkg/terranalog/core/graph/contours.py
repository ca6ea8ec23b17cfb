from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from skimage import measure

from terranalog.core.raster.dem_grid import DemGrid
from terranalog.exception import StageInputError

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContourSet:
    """
    Contour polylines of one grid.

    Coordinates are meters in the grid's own frame: ``x = col * cell_size``
    and ``y = row * cell_size``.
    """

    interval: float
    polylines: List[np.ndarray] = field(default_factory=list)
    levels: List[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.polylines)

    @property
    def total_length(self) -> float:
        return float(
            sum(
                np.linalg.norm(np.diff(line, axis=0), axis=1).sum()
                for line in self.polylines
            )
        )

    def segments(self) -> Tuple[np.ndarray, np.ndarray]:
        """Start and end points of every polyline segment, ``(S, 2)`` each."""
        if not self.polylines:
            empty = np.empty((0, 2))
            return empty, empty
        starts = np.concatenate([line[:-1] for line in self.polylines])
        ends = np.concatenate([line[1:] for line in self.polylines])
        return starts, ends


def contour_levels(grid: DemGrid, interval: float) -> np.ndarray:
    """Multiples of ``interval`` strictly between the lowest and highest valid cell."""
    values = grid.valid_elevations()
    if values.size == 0:
        return np.empty(0)
    low, high = float(values.min()), float(values.max())
    base = math.floor(low / interval) * interval
    levels = base + interval * np.arange(0, math.floor((high - base) / interval) + 1)
    return levels[(levels > low) & (levels < high)]


def extract_contours(grid: DemGrid, interval: float) -> ContourSet:
    """
    Trace level sets by marching squares with linear interpolation along cell edges.

    Nodata cells are masked out. Levels are multiples of ``interval`` based at
    ``floor(min / interval) * interval``; levels touching only the extreme
    value are skipped, so a flat grid yields an empty set.
    """
    if not interval > 0:
        raise StageInputError(f"Contour interval must be positive, got {interval}.")
    if grid.rows < 2 or grid.cols < 2:
        raise StageInputError(f"Contours need at least 2x2 cells, got {grid.shape}.")
    image = grid.filled(0.0)
    mask = grid.valid_mask if grid.has_nodata else None
    polylines, levels = [], []
    for level in contour_levels(grid, interval):
        for path in measure.find_contours(image, level, mask=mask):
            if len(path) < 2:
                continue
            # (row, col) pixels to (x, y) meters.
            polylines.append(path[:, ::-1] * grid.cell_size)
            levels.append(float(level))
    _logger.debug("Extracted %d contour polylines at %.1f m", len(polylines), interval)
    return ContourSet(interval=float(interval), polylines=polylines, levels=levels)


@dataclass(frozen=True)
class NodeSample:
    """Sampled contour nodes: ``xy`` in meters and ``z`` the contour level."""

    xy: np.ndarray
    z: np.ndarray

    def __len__(self) -> int:
        return len(self.z)


def _walk(line: np.ndarray, spacing: float) -> np.ndarray:
    lengths = np.linalg.norm(np.diff(line, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(lengths)])
    stations = np.arange(0.0, arc[-1] + 1e-9, spacing)
    closed = len(line) > 2 and np.allclose(line[0], line[-1])
    if closed and stations.size > 1 and math.isclose(
        stations[-1], arc[-1], rel_tol=1e-9, abs_tol=1e-9
    ):
        stations = stations[:-1]
    x = np.interp(stations, arc, line[:, 0])
    y = np.interp(stations, arc, line[:, 1])
    return np.column_stack([x, y])


def sample_nodes(contours: ContourSet, spacing: float) -> NodeSample:
    """
    Place a node every ``spacing`` meters of arc length along each polyline,
    starting at its first point.

    A closed ring does not repeat its start node at the end. Nodes at exactly
    the same position, from touching polylines, are kept once.
    """
    if not spacing > 0:
        raise StageInputError(f"Node spacing must be positive, got {spacing}.")
    points, heights = [], []
    for line, level in zip(contours.polylines, contours.levels):
        sampled = _walk(line, spacing)
        points.append(sampled)
        heights.append(np.full(len(sampled), level))
    if not points:
        return NodeSample(xy=np.empty((0, 2)), z=np.empty(0))
    xy = np.concatenate(points)
    z = np.concatenate(heights)
    _, first = np.unique(xy, axis=0, return_index=True)
    keep = np.sort(first)
    return NodeSample(xy=xy[keep], z=z[keep])
