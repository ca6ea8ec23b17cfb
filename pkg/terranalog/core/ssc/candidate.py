from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from terranalog.core.raster.dem_grid import BoundingBox, DemGrid


@dataclass(frozen=True)
class LineFit:
    """
    Straight-line fit of a skeleton, in pixel coordinates of the host tile.

    Parameters
    ----------
    slope : float
        Rise in rows per column; ``inf`` for vertical lines.
    intercept : float
        Row at column 0; ``nan`` for vertical lines.
    length : float
        Extent of the pixel projections along the line, pixels.
    mse : float
        Mean squared perpendicular distance to the line, pixels².
    centroid : tuple of float
        ``(row, col)`` the line passes through.
    direction : tuple of float
        Unit ``(drow, dcol)`` along the line, with ``dcol > 0`` or ``dcol == 0``
        and ``drow > 0``.
    start, end : tuple of float
        Endpoints of the fitted segment.
    """

    slope: float
    intercept: float
    length: float
    mse: float
    centroid: Tuple[float, float]
    direction: Tuple[float, float]
    start: Tuple[float, float]
    end: Tuple[float, float]

    @property
    def normal(self) -> Tuple[float, float]:
        dr, dc = self.direction
        return dc, -dr

    def shifted(self, rows: float, cols: float) -> LineFit:
        """The same fit expressed in a frame offset by ``(rows, cols)``."""

        def move(point: Tuple[float, float]) -> Tuple[float, float]:
            return point[0] - rows, point[1] - cols

        intercept = self.intercept
        if math.isfinite(self.slope):
            intercept = self.intercept - rows + self.slope * cols
        return LineFit(
            slope=self.slope,
            intercept=intercept,
            length=self.length,
            mse=self.mse,
            centroid=move(self.centroid),
            direction=self.direction,
            start=move(self.start),
            end=move(self.end),
        )

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "length": self.length,
            "mse": self.mse,
            "centroid_row": self.centroid[0],
            "centroid_col": self.centroid[1],
            "dir_row": self.direction[0],
            "dir_col": self.direction[1],
            "start_row": self.start[0],
            "start_col": self.start[1],
            "end_row": self.end[0],
            "end_col": self.end[1],
        }

    @classmethod
    def from_dict(cls, data: dict) -> LineFit:
        return cls(
            slope=float(data["slope"]),
            intercept=float(data["intercept"]),
            length=float(data["length"]),
            mse=float(data["mse"]),
            centroid=(float(data["centroid_row"]), float(data["centroid_col"])),
            direction=(float(data["dir_row"]), float(data["dir_col"])),
            start=(float(data["start_row"]), float(data["start_col"])),
            end=(float(data["end_row"]), float(data["end_col"])),
        )

    @classmethod
    def through(cls, start: Tuple[float, float], end: Tuple[float, float]) -> LineFit:
        """Exact fit of the segment from ``start`` to ``end``."""
        a = np.asarray(start, dtype=np.float64)
        b = np.asarray(end, dtype=np.float64)
        vector = b - a
        length = float(np.hypot(*vector))
        if length == 0:
            raise ValueError("Segment endpoints coincide.")
        direction = vector / length
        if direction[1] < 0 or (direction[1] == 0 and direction[0] < 0):
            direction, a, b = -direction, b, a
        return assemble_fit(a, b, direction, length, 0.0)


def assemble_fit(
    start: np.ndarray, end: np.ndarray, direction: np.ndarray, length: float, mse: float
) -> LineFit:
    centroid = (start + end) / 2.0
    if direction[1] == 0:
        slope, intercept = math.inf, math.nan
    else:
        slope = float(direction[0] / direction[1])
        intercept = float(centroid[0] - slope * centroid[1])
    return LineFit(
        slope=slope,
        intercept=intercept,
        length=length,
        mse=mse,
        centroid=(float(centroid[0]), float(centroid[1])),
        direction=(float(direction[0]), float(direction[1])),
        start=(float(start[0]), float(start[1])),
        end=(float(end[0]), float(end[1])),
    )


@dataclass(frozen=True)
class ValleyCandidate:
    """
    A clipped valley raster with the line fit of its skeleton.

    ``fit`` and ``box`` are in the pixel frame of ``source_tile``;
    :meth:`local_fit` moves the fit into the frame of ``raster``.
    """

    id: str
    raster: DemGrid
    fit: LineFit
    source_tile: str
    box: BoundingBox

    def __post_init__(self) -> None:
        if self.raster.shape != (self.box.rows, self.box.cols):
            raise ValueError(
                f"Candidate {self.id}: raster {self.raster.shape} does not match "
                f"box {self.box.rows}x{self.box.cols}."
            )

    def local_fit(self) -> LineFit:
        return self.fit.shifted(self.box.row_min, self.box.col_min)

    @classmethod
    def from_grid(cls, id: str, grid: DemGrid, fit: LineFit) -> ValleyCandidate:
        """Wrap a whole grid, with ``fit`` in its own frame, as a candidate."""
        box = BoundingBox(0, grid.rows - 1, 0, grid.cols - 1)
        return cls(id=id, raster=grid, fit=fit, source_tile=id, box=box)
