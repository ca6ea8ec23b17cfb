from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import ndimage

from terranalog.core.raster.dem_grid import DemGrid
from terranalog.core.ssc.candidate import LineFit, ValleyCandidate
from terranalog.exception import ExtentError, StageInputError

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReferenceTrench:
    """A trench resampled so that its axis runs along the grid columns."""

    grid: DemGrid
    fit: LineFit
    center: Tuple[float, float]
    azimuth: float

    def as_candidate(self, id: str = "reference") -> ValleyCandidate:
        return ValleyCandidate.from_grid(id, self.grid, self.fit)


def axis_fit(grid: DemGrid) -> LineFit:
    """Fit along the long dimension of ``grid`` through its center."""
    if grid.cols >= grid.rows:
        middle = (grid.rows - 1) / 2.0
        return LineFit.through((middle, 0.0), (middle, grid.cols - 1.0))
    middle = (grid.cols - 1) / 2.0
    return LineFit.through((0.0, middle), (grid.rows - 1.0, middle))


def reference_candidate(grid: DemGrid, id: str = "reference") -> ValleyCandidate:
    """Treat an already clipped trench grid as a candidate along its long axis."""
    return ValleyCandidate.from_grid(id, grid, axis_fit(grid))


def _climb(profile: np.ndarray, start: int, step: int) -> int:
    """Walk from ``start`` while the profile keeps rising; return the last index."""
    index = start
    while 0 <= index + step < profile.size:
        ahead = profile[index + step]
        if not np.isfinite(ahead) or ahead < profile[index]:
            break
        index += step
    return index


def extract_reference_trench(
    grid: DemGrid,
    azimuth: float,
    length: float = 25_000.0,
    max_width: float = 3_000.0,
    center: Optional[Tuple[float, float]] = None,
    resolution: Optional[float] = None,
) -> ReferenceTrench:
    """
    Resample the reference trench out of a larger bathymetry grid.

    The window is centered on ``center`` (``(row, col)``), or on the deepest
    valid cell, with its long axis along ``azimuth`` degrees clockwise from
    north. The cross-axis extent is then narrowed to the flank crests, where
    the mean cross profile stops rising on either side of the axis.

    Parameters
    ----------
    grid : DemGrid
        Source bathymetry.
    azimuth : float
        Axis bearing in degrees.
    length, max_width : float
        Window size along and across the axis, meters.
    center : tuple of float, optional
        Sampling site in pixels.
    resolution : float, optional
        Output cell size in meters, the source cell size by default.

    Returns
    -------
    ReferenceTrench
        The resampled grid with an exact fit along the row of the axis.

    Raises
    ------
    ExtentError
        If the window leaves the grid or covers nodata.
    """
    resolution = grid.cell_size if resolution is None else float(resolution)
    if center is None:
        deepest = np.argmin(np.where(grid.valid_mask, grid.elevations, np.inf))
        center = tuple(float(v) for v in np.unravel_index(deepest, grid.shape))
    theta = math.radians(azimuth)
    along = np.array([-math.cos(theta), math.sin(theta)])
    across = np.array([along[1], -along[0]])

    n_along = max(int(round(length / resolution)), 3)
    n_across = max(int(round(max_width / resolution)), 3)
    t = (np.arange(n_along) - (n_along - 1) / 2.0) * resolution / grid.cell_size
    s = (np.arange(n_across) - (n_across - 1) / 2.0) * resolution / grid.cell_size
    rows = center[0] + s[:, None] * across[0] + t[None, :] * along[0]
    cols = center[1] + s[:, None] * across[1] + t[None, :] * along[1]

    if (
        rows.min() < 0
        or cols.min() < 0
        or rows.max() > grid.rows - 1
        or cols.max() > grid.cols - 1
    ):
        raise ExtentError("Reference window extends beyond the source grid.")
    coords = np.stack([rows, cols])
    values = ndimage.map_coordinates(grid.filled(0.0), coords, order=1)
    invalid = ndimage.map_coordinates(
        grid.nodata_mask.astype(np.float64), coords, order=1
    )
    if np.any(invalid > 0):
        raise ExtentError("Reference window covers nodata cells.")

    profile = values.mean(axis=1)
    middle = (n_across - 1) // 2
    top = _climb(profile, middle, -1)
    bottom = _climb(profile, middle, 1)
    if bottom - top + 1 < 3:
        raise StageInputError("Reference cross profile has no flanks to climb.")
    values = values[top : bottom + 1]

    trench = DemGrid(values, cell_size=resolution)
    _logger.info(
        "Reference trench: %dx%d cells at %.1f m, azimuth %.1f",
        trench.rows,
        trench.cols,
        resolution,
        azimuth,
    )
    return ReferenceTrench(
        grid=trench,
        fit=LineFit.through(
            (float(middle - top), 0.0), (float(middle - top), trench.cols - 1.0)
        ),
        center=center,
        azimuth=azimuth,
    )
