"""
Geomorphometric node features.

Grid features (VRM, ACR) work in the grid's pixel frame; contour features
(CD, DSE) and the pairwise slope work in meters.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from terranalog.core.graph.contours import ContourSet
from terranalog.core.raster.dem_grid import BoundingBox, DemGrid
from terranalog.exception import ExtentError, StageInputError
from terranalog.util.geometry import clip_segments_to_disk

# VRM below this is round-off from summing identical normals.
_VRM_FLOOR = 1e-12


def unit_normals(grid: DemGrid) -> np.ndarray:
    """
    Surface unit normals ``(rows, cols, 3)`` from central differences.

    Nodata cells are first filled from their nearest valid cell so the
    differences of their neighbours stay finite.
    """
    values = grid.filled(np.nan)
    if grid.has_nodata and grid.valid_mask.any():
        _, (near_r, near_c) = ndimage.distance_transform_edt(
            grid.nodata_mask, return_indices=True
        )
        values = values[near_r, near_c]
    values = np.nan_to_num(values)
    if grid.rows > 1 and grid.cols > 1:
        dz_dy, dz_dx = np.gradient(values, grid.cell_size)
    else:
        dz_dy = dz_dx = np.zeros_like(values)
    normals = np.stack([-dz_dx, -dz_dy, np.ones_like(values)], axis=-1)
    return normals / np.linalg.norm(normals, axis=-1, keepdims=True)


def _dispersion(resultant: np.ndarray, count: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        value = 1.0 - np.linalg.norm(resultant, axis=-1) / count
    value = np.clip(value, 0.0, 1.0)
    return np.where(value < _VRM_FLOOR, 0.0, value)


def vrm(grid: DemGrid, center: Tuple[int, int], window: int = 3) -> float:
    """
    Vector ruggedness: ``1 - |sum of unit normals| / n`` over a square window.

    Raises
    ------
    StageInputError
        If ``window`` is not odd and at least 3.
    ExtentError
        If the window leaves the grid.
    StageInputError
        If the window holds nodata.
    """
    if window < 3 or window % 2 == 0:
        raise StageInputError(f"VRM window must be odd and >= 3, got {window}.")
    half = window // 2
    row, col = int(center[0]), int(center[1])
    if not (half <= row < grid.rows - half and half <= col < grid.cols - half):
        raise ExtentError(
            f"VRM window at {center} leaves the {grid.rows}x{grid.cols} grid."
        )
    block = (slice(row - half, row + half + 1), slice(col - half, col + half + 1))
    if grid.nodata_mask[block].any():
        raise StageInputError(f"VRM window at {center} holds nodata.")
    normals = unit_normals(grid)[block].reshape(-1, 3)
    return float(_dispersion(normals.sum(axis=0), np.array(len(normals)))[()])


def vrm_map(grid: DemGrid, window: int = 3) -> np.ndarray:
    """
    VRM of every cell, counting only valid cells inside the grid.

    Nodata cells get ``nan``.
    """
    if window < 3 or window % 2 == 0:
        raise StageInputError(f"VRM window must be odd and >= 3, got {window}.")
    valid = grid.valid_mask.astype(np.float64)
    normals = unit_normals(grid) * valid[..., None]
    means = np.stack(
        [
            ndimage.uniform_filter(normals[..., k], size=window, mode="constant")
            for k in range(3)
        ],
        axis=-1,
    )
    share = ndimage.uniform_filter(valid, size=window, mode="constant")
    result = _dispersion(means, share)
    result[~grid.valid_mask] = np.nan
    return result


def _quad_mask(
    grid: DemGrid, box: BoundingBox, footprint: Optional[np.ndarray]
) -> np.ndarray:
    shape = (box.rows - 1, box.cols - 1)
    if footprint is None:
        return np.ones(shape, dtype=bool)
    mask = np.asarray(footprint, dtype=bool)
    if mask.shape != shape:
        raise StageInputError(
            f"Footprint shape {mask.shape} does not match quads {shape}."
        )
    return mask


def acr(
    grid: DemGrid, box: BoundingBox, footprint: Optional[np.ndarray] = None
) -> float:
    """
    Arc-chord ratio: 3-D surface area over the area of the footprint projected
    onto the total-least-squares plane of the patch.

    Each cell quad is split into two triangles along its ``(r, c)-(r+1, c+1)``
    diagonal. The planar area is the horizontal footprint area divided by the
    plane normal's vertical component.

    Parameters
    ----------
    grid : DemGrid
        Source grid.
    box : BoundingBox
        Patch of at least 2×2 cells.
    footprint : numpy.ndarray of bool, optional
        ``(box.rows - 1, box.cols - 1)`` quads to include; all by default.

    Raises
    ------
    StageInputError
        If the patch is smaller than 2×2, the footprint is empty, or a used
        vertex is nodata.
    ExtentError
        If the box leaves the grid.
    """
    if box.rows < 2 or box.cols < 2:
        raise StageInputError(
            f"ACR needs at least 2x2 cells, got {box.rows}x{box.cols}."
        )
    if not box.fits(grid.rows, grid.cols):
        raise ExtentError(f"ACR patch {box.to_dict()} leaves the grid.")
    quads = _quad_mask(grid, box, footprint)
    if not quads.any():
        raise StageInputError("ACR footprint is empty.")
    block = (slice(box.row_min, box.row_max + 1), slice(box.col_min, box.col_max + 1))
    z = grid.elevations[block]
    used = np.zeros(z.shape, dtype=bool)
    for dr in (0, 1):
        for dc in (0, 1):
            used[dr : dr + quads.shape[0], dc : dc + quads.shape[1]] |= quads
    if grid.nodata_mask[block][used].any():
        raise StageInputError("ACR patch holds nodata.")

    cell = grid.cell_size
    rr, cc = np.mgrid[0 : z.shape[0], 0 : z.shape[1]].astype(np.float64) * cell
    points = np.stack([cc, rr, z], axis=-1)
    p00, p01 = points[:-1, :-1], points[:-1, 1:]
    p10, p11 = points[1:, :-1], points[1:, 1:]
    upper = 0.5 * np.linalg.norm(np.cross(p01 - p00, p11 - p00), axis=-1)
    lower = 0.5 * np.linalg.norm(np.cross(p11 - p00, p10 - p00), axis=-1)
    surface = float((upper + lower)[quads].sum())

    cloud = points[used]
    if np.ptp(cloud[:, 2]) == 0:
        n_z = 1.0
    else:
        centered = cloud - cloud.mean(axis=0)
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        n_z = abs(float(vt[-1, 2]))
    planar = quads.sum() * cell * cell / n_z
    return surface / planar


def slope_between(node_i: Sequence[float], node_j: Sequence[float]) -> float:
    """
    Slope in degrees between two ``(x, y, z)`` nodes.

    Raises
    ------
    StageInputError
        If the nodes share their horizontal position.
    """
    distance = math.hypot(node_j[0] - node_i[0], node_j[1] - node_i[1])
    if distance == 0:
        raise StageInputError("Slope is undefined between coincident nodes.")
    return math.degrees(math.atan2(abs(node_j[2] - node_i[2]), distance))


class SegmentIndex:
    """Contour segments with a KD-tree over their midpoints."""

    def __init__(self, contours: ContourSet):
        self.starts, self.ends = contours.segments()
        midpoints = (self.starts + self.ends) / 2.0
        self._reach = (
            float(np.linalg.norm(self.ends - self.starts, axis=1).max()) / 2.0
            if len(midpoints)
            else 0.0
        )
        self._tree = cKDTree(midpoints) if len(midpoints) else None

    def clip(
        self, center: Sequence[float], radius: float
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Lengths and undirected azimuths of the segments inside the disk."""
        if self._tree is None:
            return np.empty(0), np.empty(0)
        near = self._tree.query_ball_point(center, radius + self._reach)
        if not near:
            return np.empty(0), np.empty(0)
        near = np.sort(np.asarray(near))
        lengths, azimuths = clip_segments_to_disk(
            self.starts[near],
            self.ends[near],
            np.asarray(center, dtype=np.float64),
            radius,
        )
        inside = lengths > 0
        return lengths[inside], azimuths[inside]


def _index(contours, index: Optional[SegmentIndex]) -> SegmentIndex:
    return index if index is not None else SegmentIndex(contours)


def contour_density(
    node: Sequence[float],
    contours: ContourSet,
    r: float = 500.0,
    index: Optional[SegmentIndex] = None,
) -> float:
    """Contour length inside the radius-``r`` disk around the node, per square meter."""
    if not r > 0:
        raise StageInputError(f"Radius must be positive, got {r}.")
    lengths, _ = _index(contours, index).clip(node[:2], r)
    return float(lengths.sum() / (math.pi * r * r))


def direction_entropy(
    node: Sequence[float],
    contours: ContourSet,
    r: float = 500.0,
    bins: int = 36,
    index: Optional[SegmentIndex] = None,
) -> float:
    """
    Shannon entropy, in nats, of the length-weighted contour azimuths in the disk.

    Azimuths are undirected and binned uniformly over ``[0, pi)``. A disk
    without contours has entropy 0.
    """
    if bins < 2:
        raise StageInputError(f"Entropy needs at least 2 bins, got {bins}.")
    if not r > 0:
        raise StageInputError(f"Radius must be positive, got {r}.")
    lengths, azimuths = _index(contours, index).clip(node[:2], r)
    total = lengths.sum()
    if total <= 0:
        return 0.0
    which = np.minimum((azimuths / (np.pi / bins)).astype(np.int64), bins - 1)
    p = np.bincount(which, weights=lengths, minlength=bins) / total
    p = p[p > 0]
    return float(np.clip(-(p * np.log(p)).sum(), 0.0, math.log(bins)))
