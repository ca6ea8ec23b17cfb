from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from terranalog.core.ssc.candidate import ValleyCandidate
from terranalog.exception import StageInputError

_logger = logging.getLogger(__name__)

# Interpolated nodata weight above which a sample counts as touching nodata.
_NODATA_WEIGHT = 1e-9


@dataclass(frozen=True)
class SliceSequence:
    """
    Cross-section profiles taken along a valley axis.

    Parameters
    ----------
    slices : numpy.ndarray
        ``(n, slice_width)`` elevations in meters, ordered along the axis.
    slice_width : int
        Points per slice.
    along_spacing : float
        Meters between consecutive slices.
    """

    slices: np.ndarray
    slice_width: int
    along_spacing: float

    def __post_init__(self) -> None:
        slices = np.asarray(self.slices, dtype=np.float64)
        if slices.ndim == 1:
            slices = slices[:, None]
        if slices.ndim != 2 or slices.shape[0] == 0:
            raise StageInputError("A slice sequence needs at least one slice.")
        if slices.shape[1] != self.slice_width:
            raise StageInputError(
                f"Slices have {slices.shape[1]} points, expected {self.slice_width}."
            )
        slices.flags.writeable = False
        object.__setattr__(self, "slices", slices)

    def __len__(self) -> int:
        return self.slices.shape[0]

    def reversed(self) -> SliceSequence:
        """The same slices in the opposite along-axis order."""
        return SliceSequence(
            self.slices[::-1].copy(), self.slice_width, self.along_spacing
        )

    @classmethod
    def from_values(cls, values, along_spacing: float = 1.0) -> SliceSequence:
        """Build a sequence from nested lists; scalars become one-point slices."""
        array = np.asarray(values, dtype=np.float64)
        if array.ndim == 1:
            array = array[:, None]
        return cls(array, array.shape[1], along_spacing)


def _symmetric_half_span(
    center: np.ndarray, normal: np.ndarray, rows: int, cols: int
) -> float:
    """Largest ``s`` with ``center ± s * normal`` inside the pixel grid."""
    limits = []
    for axis, size in ((0, rows), (1, cols)):
        component = abs(normal[axis])
        if component > 1e-12:
            room = min(center[axis], size - 1 - center[axis])
            limits.append(room / component)
    return max(min(limits), 0.0) if limits else 0.0


def slice_decompose(
    cand: ValleyCandidate,
    width: int = 38,
    spacing: Optional[float] = None,
    cross_length: Optional[float] = None,
) -> SliceSequence:
    """
    Sample cross-section profiles perpendicular to the candidate's fitted axis.

    Slices start at the fitted segment's start point and step every
    ``spacing`` meters towards its end. Each slice holds ``width`` equidistant
    samples along the normal, centered on the axis, read by bilinear
    interpolation. Slices touching nodata or leaving the raster are dropped.

    Parameters
    ----------
    cand : ValleyCandidate
        Candidate raster and line fit.
    width : int
        Points per slice.
    spacing : float, optional
        Meters between slices, one cell by default.
    cross_length : float, optional
        Total slice length in meters. By default the widest span that stays
        inside the raster on both sides of the axis centroid, so narrower
        rasters are resampled up to ``width`` points.

    Raises
    ------
    StageInputError
        If ``width < 3``, the raster has no cross-axis extent, or no slice
        survives.
    """
    if width < 3:
        raise StageInputError(f"Slice width must be at least 3, got {width}.")
    grid = cand.raster
    fit = cand.local_fit()
    cell = grid.cell_size
    spacing = cell if spacing is None else float(spacing)
    if spacing <= 0:
        raise StageInputError(f"Slice spacing must be positive, got {spacing}.")

    start = np.asarray(fit.start, dtype=np.float64)
    direction = np.asarray(fit.direction, dtype=np.float64)
    normal = np.asarray(fit.normal, dtype=np.float64)
    centroid = np.asarray(fit.centroid, dtype=np.float64)

    if cross_length is None:
        half = _symmetric_half_span(centroid, normal, grid.rows, grid.cols)
    else:
        half = float(cross_length) / 2.0 / cell
    if half <= 0 or not math.isfinite(half):
        raise StageInputError(f"Candidate {cand.id} has no extent across its axis.")

    steps = np.arange(0.0, fit.length + 1e-9, spacing / cell)
    offsets = np.linspace(-half, half, width)
    axis_points = start[None, :] + steps[:, None] * direction[None, :]
    rows = axis_points[:, 0, None] + offsets[None, :] * normal[0]
    cols = axis_points[:, 1, None] + offsets[None, :] * normal[1]
    coords = np.stack([rows, cols])

    values = ndimage.map_coordinates(grid.filled(0.0), coords, order=1, mode="nearest")
    touched = ndimage.map_coordinates(
        grid.nodata_mask.astype(np.float64), coords, order=1, mode="constant", cval=1.0
    )
    inside = (
        (rows >= -1e-9)
        & (rows <= grid.rows - 1 + 1e-9)
        & (cols >= -1e-9)
        & (cols <= grid.cols - 1 + 1e-9)
    )
    usable = np.all(inside & (touched <= _NODATA_WEIGHT), axis=1)
    if not usable.any():
        raise StageInputError(f"Candidate {cand.id} has no usable slices.")
    dropped = int(usable.size - usable.sum())
    if dropped:
        _logger.debug(
            "Candidate %s: dropped %d of %d slices", cand.id, dropped, usable.size
        )
    return SliceSequence(values[usable], width, spacing)
