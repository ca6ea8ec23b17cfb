from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from terranalog.exception import ExtentError

_logger = logging.getLogger(__name__)

# Length of one degree of latitude, used to express geographic cell sizes in meters.
METERS_PER_DEGREE = 111_320.0

DEFAULT_NODATA = -9999.0


@dataclass(frozen=True)
class BoundingBox:
    """
    An inclusive rectangle of pixel indices.

    Parameters
    ----------
    row_min, row_max : int
        First and last row, inclusive.
    col_min, col_max : int
        First and last column, inclusive.
    """

    row_min: int
    row_max: int
    col_min: int
    col_max: int

    def __post_init__(self) -> None:
        if self.row_min > self.row_max or self.col_min > self.col_max:
            raise ExtentError(f"Degenerate bounding box: {self.to_dict()}")
        if self.row_min < 0 or self.col_min < 0:
            raise ExtentError(f"Negative bounding box index: {self.to_dict()}")

    @property
    def rows(self) -> int:
        return self.row_max - self.row_min + 1

    @property
    def cols(self) -> int:
        return self.col_max - self.col_min + 1

    @property
    def area(self) -> int:
        return self.rows * self.cols

    def fits(self, rows: int, cols: int) -> bool:
        return self.row_max < rows and self.col_max < cols

    def expand(self, margin: int, rows: int, cols: int) -> BoundingBox:
        """Grow the box by ``margin`` pixels on every side, clamped to the host."""
        return BoundingBox(
            max(self.row_min - margin, 0),
            min(self.row_max + margin, rows - 1),
            max(self.col_min - margin, 0),
            min(self.col_max + margin, cols - 1),
        )

    def to_dict(self) -> dict:
        return {
            "row_min": self.row_min,
            "row_max": self.row_max,
            "col_min": self.col_min,
            "col_max": self.col_max,
        }

    @classmethod
    def around(cls, pixels: np.ndarray) -> BoundingBox:
        """Smallest box containing every ``(row, col)`` in ``pixels``."""
        pixels = np.asarray(pixels)
        return cls(
            int(pixels[:, 0].min()),
            int(pixels[:, 0].max()),
            int(pixels[:, 1].min()),
            int(pixels[:, 1].max()),
        )


class DemGrid:
    """
    Immutable georeferenced elevation raster.

    Elevations are meters, stored row-major from north to south. A cell is
    nodata when it equals ``nodata_value``, is not finite, or is flagged in the
    optional ``nodata_mask`` (zero-padded mosaic borders use the latter).

    Parameters
    ----------
    elevations : array_like, shape (rows, cols)
        Elevation values in meters.
    cell_size : float
        Ground size of one pixel in meters.
    origin : tuple of float, optional
        ``(x, y)`` of the upper-left corner, degrees for geographic grids.
    nodata_value : float, optional
        Sentinel elevation marking missing cells.
    nodata_mask : array_like of bool, optional
        Extra cells to treat as nodata.
    cell_degrees : float, optional
        Angular cell size for geographic grids. When given, the origin is in
        degrees and moves by this step per pixel.

    Examples
    --------
    >>> grid = DemGrid([[1.0, 2.0], [3.0, 4.0]], cell_size=30.0)
    >>> grid.shape
    (2, 2)
    """

    __slots__ = (
        "_elevations",
        "_nodata",
        "_cell_size",
        "_origin",
        "_nodata_value",
        "_cell_degrees",
    )

    def __init__(
        self,
        elevations,
        cell_size: float,
        origin: Tuple[float, float] = (0.0, 0.0),
        nodata_value: float = DEFAULT_NODATA,
        nodata_mask=None,
        cell_degrees: Optional[float] = None,
    ):
        values = np.array(elevations, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"Elevations must be 2-D, got {values.ndim}-D.")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"Grid must have at least one cell, got {values.shape}.")
        if not cell_size > 0:
            raise ValueError(f"Cell size must be positive, got {cell_size}.")
        if cell_degrees is not None and not cell_degrees > 0:
            raise ValueError(f"Cell degrees must be positive, got {cell_degrees}.")

        nodata = ~np.isfinite(values) | (values == nodata_value)
        if nodata_mask is not None:
            extra = np.asarray(nodata_mask, dtype=bool)
            if extra.shape != values.shape:
                raise ValueError(
                    f"Nodata mask shape {extra.shape} does not match {values.shape}."
                )
            nodata |= extra
        # Masked cells hold the sentinel so raw arrays never leak NaN downstream.
        values[nodata & ~np.isfinite(values)] = nodata_value

        values.setflags(write=False)
        nodata.setflags(write=False)
        self._elevations = values
        self._nodata = nodata
        self._cell_size = float(cell_size)
        self._origin = (float(origin[0]), float(origin[1]))
        self._nodata_value = float(nodata_value)
        self._cell_degrees = None if cell_degrees is None else float(cell_degrees)

    @property
    def rows(self) -> int:
        return self._elevations.shape[0]

    @property
    def cols(self) -> int:
        return self._elevations.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self._elevations.shape

    @property
    def elevations(self) -> np.ndarray:
        return self._elevations

    @property
    def nodata_mask(self) -> np.ndarray:
        return self._nodata

    @property
    def valid_mask(self) -> np.ndarray:
        return ~self._nodata

    @property
    def has_nodata(self) -> bool:
        return bool(self._nodata.any())

    @property
    def cell_size(self) -> float:
        return self._cell_size

    @property
    def origin(self) -> Tuple[float, float]:
        return self._origin

    @property
    def nodata_value(self) -> float:
        return self._nodata_value

    @property
    def cell_degrees(self) -> Optional[float]:
        return self._cell_degrees

    @property
    def geographic(self) -> bool:
        return self._cell_degrees is not None

    @property
    def origin_step(self) -> float:
        """Distance the origin moves per pixel, in origin units."""
        return self._cell_degrees if self.geographic else self._cell_size

    @property
    def footprint(self) -> Tuple[float, float, float, float]:
        """``(x_min, y_min, x_max, y_max)`` covered by the grid, in origin units."""
        x0, y0 = self._origin
        step = self.origin_step
        return x0, y0 - self.rows * step, x0 + self.cols * step, y0

    def filled(self, fill: float = np.nan) -> np.ndarray:
        """Copy of the elevations with nodata cells replaced by ``fill``."""
        out = self._elevations.copy()
        out[self._nodata] = fill
        return out

    def valid_elevations(self) -> np.ndarray:
        return self._elevations[~self._nodata]

    def crop(self, box: BoundingBox) -> DemGrid:
        return crop(self, box)

    def replace(self, elevations=None, **changes) -> DemGrid:
        """New grid sharing georeference with this one, with fields swapped out."""
        kwargs = {
            "elevations": self._elevations if elevations is None else elevations,
            "cell_size": self._cell_size,
            "origin": self._origin,
            "nodata_value": self._nodata_value,
            "nodata_mask": self._nodata if elevations is None else None,
            "cell_degrees": self._cell_degrees,
        }
        kwargs.update(changes)
        return DemGrid(**kwargs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DemGrid):
            return NotImplemented
        return (
            self.shape == other.shape
            and self._cell_size == other._cell_size
            and self._origin == other._origin
            and self._cell_degrees == other._cell_degrees
            and bool(np.array_equal(self._nodata, other._nodata))
            and bool(
                np.array_equal(
                    self._elevations[~self._nodata], other._elevations[~other._nodata]
                )
            )
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"DemGrid(rows={self.rows}, cols={self.cols}, "
            f"cell_size={self._cell_size}, origin={self._origin})"
        )


def crop(grid: DemGrid, box: BoundingBox) -> DemGrid:
    """
    Cut ``box`` out of ``grid``.

    The origin moves by the box offset times the origin step, so the crop keeps
    its place on the ground.

    Raises
    ------
    ExtentError
        If the box does not lie inside the grid.
    """
    if not box.fits(grid.rows, grid.cols):
        raise ExtentError(
            f"Box {box.to_dict()} exceeds grid extent {grid.rows}x{grid.cols}."
        )
    rows = slice(box.row_min, box.row_max + 1)
    cols = slice(box.col_min, box.col_max + 1)
    x0, y0 = grid.origin
    step = grid.origin_step
    return DemGrid(
        grid.elevations[rows, cols],
        cell_size=grid.cell_size,
        origin=(x0 + box.col_min * step, y0 - box.row_min * step),
        nodata_value=grid.nodata_value,
        nodata_mask=grid.nodata_mask[rows, cols],
        cell_degrees=grid.cell_degrees,
    )
