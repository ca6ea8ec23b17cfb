"""
ESRI ASCII grid reader and writer.

The header carries ``ncols``, ``nrows``, ``xllcorner`` (or ``xllcenter``),
``yllcorner`` (or ``yllcenter``), ``cellsize`` and an optional
``NODATA_value``; keys are case-insensitive. Data rows follow from north to
south, one row per line, starting at the first line that is not an unseen
header key, so a row may open with ``nan``.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from terranalog.core.raster.dem_grid import DEFAULT_NODATA, METERS_PER_DEGREE, DemGrid
from terranalog.exception import GridFormatError

_logger = logging.getLogger(__name__)

_REQUIRED_KEYS = ("ncols", "nrows", "cellsize")
_KNOWN_KEYS = (
    "ncols",
    "nrows",
    "xllcorner",
    "xllcenter",
    "yllcorner",
    "yllcenter",
    "cellsize",
    "nodata_value",
)

# Cell sizes below this, with lon/lat-range corners, are read as degrees.
_GEOGRAPHIC_CELLSIZE_LIMIT = 0.1

PathLike = Union[str, os.PathLike]


def _looks_geographic(cellsize: float, x: float, y: float) -> bool:
    return cellsize < _GEOGRAPHIC_CELLSIZE_LIMIT and abs(x) <= 360 and abs(y) <= 90


def load_ascii_grid(path: PathLike, geographic: Optional[bool] = None) -> DemGrid:
    """
    Read an ESRI ASCII grid.

    Parameters
    ----------
    path : str or os.PathLike
        File to read.
    geographic : bool, optional
        Whether ``cellsize`` is in degrees. Detected from the header when
        omitted: tiny cell sizes with longitude/latitude corners are degrees.

    Returns
    -------
    DemGrid
        The grid, with sentinel cells flagged as nodata.

    Raises
    ------
    GridFormatError
        For a malformed header, a short or long data row, or a non-numeric cell.
        The message names the offending line.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()

    header: Dict[str, float] = {}
    cursor = 0
    while cursor < len(lines):
        tokens = lines[cursor].split()
        if not tokens:
            cursor += 1
            continue
        key = tokens[0].lower()
        if key not in _KNOWN_KEYS or key in header:
            # Data starts at the first line that is not an unseen header key.
            if _is_number(tokens[0]) or _header_complete(header):
                break
            problem = "duplicate" if key in header else "unknown"
            raise GridFormatError(
                path, cursor + 1, f"{problem} header key {tokens[0]!r}"
            )
        if len(tokens) != 2:
            raise GridFormatError(path, cursor + 1, f"malformed header line for {key}")
        try:
            header[key] = float(tokens[1])
        except ValueError:
            raise GridFormatError(
                path, cursor + 1, f"non-numeric header value {tokens[1]!r}"
            ) from None
        cursor += 1

    for key in _REQUIRED_KEYS:
        if key not in header:
            raise GridFormatError(path, cursor + 1, f"missing header key {key}")
    if ("xllcorner" in header) == ("xllcenter" in header):
        raise GridFormatError(path, cursor + 1, "expected one of xllcorner/xllcenter")
    if ("yllcorner" in header) == ("yllcenter" in header):
        raise GridFormatError(path, cursor + 1, "expected one of yllcorner/yllcenter")

    ncols, nrows = header["ncols"], header["nrows"]
    if ncols != int(ncols) or nrows != int(nrows) or ncols < 1 or nrows < 1:
        raise GridFormatError(path, None, f"invalid dimensions {nrows}x{ncols}")
    ncols, nrows = int(ncols), int(nrows)
    cellsize = header["cellsize"]
    if cellsize <= 0:
        raise GridFormatError(path, None, f"cellsize must be positive, got {cellsize}")
    nodata_value = header.get("nodata_value", DEFAULT_NODATA)

    values = np.empty((nrows, ncols), dtype=np.float64)
    row = 0
    for index in range(cursor, len(lines)):
        tokens = lines[index].split()
        if not tokens:
            continue
        if row >= nrows:
            raise GridFormatError(path, index + 1, f"more than {nrows} data rows")
        if len(tokens) != ncols:
            raise GridFormatError(
                path, index + 1, f"expected {ncols} values, found {len(tokens)}"
            )
        try:
            values[row] = [float(token) for token in tokens]
        except ValueError:
            bad = next(t for t in tokens if not _is_number(t))
            raise GridFormatError(
                path, index + 1, f"non-numeric cell {bad!r}"
            ) from None
        row += 1
    if row != nrows:
        raise GridFormatError(path, len(lines), f"expected {nrows} rows, found {row}")

    x = header.get("xllcorner", header.get("xllcenter"))
    y = header.get("yllcorner", header.get("yllcenter"))
    if "xllcenter" in header:
        x -= cellsize / 2
    if "yllcenter" in header:
        y -= cellsize / 2
    # Upper-left corner: the lower-left corner moved up by the grid height.
    origin = (x, y + nrows * cellsize)

    if geographic is None:
        geographic = _looks_geographic(cellsize, x, y)
    _logger.debug(
        "Loaded %s: %dx%d cellsize=%s geographic=%s",
        path,
        nrows,
        ncols,
        cellsize,
        geographic,
    )
    if geographic:
        return DemGrid(
            values,
            cell_size=cellsize * METERS_PER_DEGREE,
            origin=origin,
            nodata_value=nodata_value,
            cell_degrees=cellsize,
        )
    return DemGrid(values, cell_size=cellsize, origin=origin, nodata_value=nodata_value)


def _header_complete(header: Dict[str, float]) -> bool:
    return (
        all(key in header for key in _REQUIRED_KEYS)
        and ("xllcorner" in header or "xllcenter" in header)
        and ("yllcorner" in header or "yllcenter" in header)
    )


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def write_ascii_grid(grid: DemGrid, path: PathLike) -> None:
    """
    Write ``grid`` as an ESRI ASCII grid.

    Values use the shortest text that reads back to the same float, so a
    load/write/load cycle reproduces every valid cell exactly. Nodata cells are
    written as the grid's sentinel.
    """
    step = grid.origin_step
    x0, y0 = grid.origin
    lines = [
        f"ncols {grid.cols}",
        f"nrows {grid.rows}",
        f"xllcorner {x0!r}",
        f"yllcorner {y0 - grid.rows * step!r}",
        f"cellsize {step!r}",
        f"NODATA_value {grid.nodata_value!r}",
    ]
    values = grid.filled(grid.nodata_value)
    for row in values.tolist():
        lines.append(" ".join(repr(value) for value in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
