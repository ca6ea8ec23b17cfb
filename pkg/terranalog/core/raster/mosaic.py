from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from terranalog.core.raster.dem_grid import DemGrid
from terranalog.exception import MosaicError

_logger = logging.getLogger(__name__)

# Relative tolerance when matching origins, as a fraction of one origin step.
_ORIGIN_TOLERANCE = 1e-6

Arrangement = Sequence[Sequence[Optional[DemGrid]]]


def _present(grids: Arrangement) -> List[Tuple[int, int, DemGrid]]:
    return [
        (i, j, grid)
        for i, row in enumerate(grids)
        for j, grid in enumerate(row)
        if grid is not None
    ]


def _offset(delta: float, step: float, extent: int, axis: str) -> int:
    cells = delta / step
    offset = int(round(cells))
    if abs(cells - offset) > _ORIGIN_TOLERANCE or not 0 < offset <= extent:
        raise MosaicError(
            f"Geographically inconsistent origins along {axis}: "
            f"neighbours are {cells:.6f} cells apart for extent {extent}."
        )
    return offset


def mosaic_tiles(grids: Arrangement) -> DemGrid:
    """
    Stitch a 2×2 arrangement of equally sized grids into one tile.

    Neighbouring grids that share border rows or columns (the usual one-pixel
    seam of 1° DEM grids) are merged so the seam appears once; the first grid
    in raster order supplies the seam values. Missing members (``None``)
    leave zero-valued cells flagged as nodata.

    Parameters
    ----------
    grids : 2×2 nested sequence of DemGrid or None
        ``grids[0][0]`` is the north-west member.

    Returns
    -------
    DemGrid
        The mosaic covering the union extent.

    Raises
    ------
    MosaicError
        For a wrong arrangement shape, mixed cell sizes or dimensions, or
        origins that do not line up.

    Examples
    --------
    Four 2×2 grids whose origins step by one cell overlap by one row and one
    column, giving a 3×3 mosaic.
    """
    if len(grids) != 2 or any(len(row) != 2 for row in grids):
        raise MosaicError("Mosaic expects a 2x2 arrangement of grids.")
    members = _present(grids)
    if not members:
        raise MosaicError("Mosaic needs at least one grid.")

    _, _, first = members[0]
    for _, _, grid in members[1:]:
        if grid.cell_size != first.cell_size or grid.cell_degrees != first.cell_degrees:
            raise MosaicError(
                f"Mismatched cell size: {grid.cell_size} vs {first.cell_size}."
            )
        if grid.shape != first.shape:
            raise MosaicError(f"Mismatched grid shape: {grid.shape} vs {first.shape}.")

    rows, cols = first.shape
    step = first.origin_step

    col_offset = rows_offset = None
    for i, j, grid in members:
        if j == 0 and grids[i][1] is not None:
            col_offset = _offset(
                grids[i][1].origin[0] - grid.origin[0], step, cols, "columns"
            )
        if i == 0 and grids[1][j] is not None:
            rows_offset = _offset(
                grid.origin[1] - grids[1][j].origin[1], step, rows, "rows"
            )
    # Without a neighbour pair the usual one-cell shared border is assumed.
    if col_offset is None:
        col_offset = cols - 1 if cols > 1 else cols
    if rows_offset is None:
        rows_offset = rows - 1 if rows > 1 else rows

    ref_i, ref_j, ref = members[0]
    x0 = ref.origin[0] - ref_j * col_offset * step
    y0 = ref.origin[1] + ref_i * rows_offset * step
    for i, j, grid in members:
        expected = (x0 + j * col_offset * step, y0 - i * rows_offset * step)
        drift = max(
            abs(grid.origin[0] - expected[0]), abs(grid.origin[1] - expected[1])
        )
        if drift > _ORIGIN_TOLERANCE * step:
            raise MosaicError(
                f"Geographically inconsistent origin at position ({i}, {j}): "
                f"{grid.origin} vs expected {expected}."
            )

    out_rows, out_cols = rows_offset + rows, col_offset + cols
    values = np.zeros((out_rows, out_cols), dtype=np.float64)
    nodata = np.ones((out_rows, out_cols), dtype=bool)
    covered = np.zeros((out_rows, out_cols), dtype=bool)
    for i, j, grid in members:
        r0, c0 = i * rows_offset, j * col_offset
        window = (slice(r0, r0 + rows), slice(c0, c0 + cols))
        fresh = ~covered[window]
        values[window][fresh] = grid.elevations[fresh]
        nodata[window][fresh] = grid.nodata_mask[fresh]
        covered[window] = True

    _logger.debug(
        "Mosaic of %d grids -> %dx%d (overlap %d rows, %d cols)",
        len(members),
        out_rows,
        out_cols,
        rows - rows_offset,
        cols - col_offset,
    )
    return DemGrid(
        values,
        cell_size=first.cell_size,
        origin=(x0, y0),
        nodata_value=first.nodata_value,
        nodata_mask=nodata,
        cell_degrees=first.cell_degrees,
    )


def build_tiles(catalog: Dict[Tuple[int, int], DemGrid]) -> List[Tuple[str, DemGrid]]:
    """
    Build one 2×2 tile per catalog grid.

    Each catalog key ``(row, col)`` becomes the north-west member of a window
    that also takes ``(row, col + 1)``, ``(row + 1, col)`` and
    ``(row + 1, col + 1)``; rows grow southward. Neighbouring tiles therefore
    share two grids, and missing neighbours are zero-padded.

    Returns
    -------
    list of (str, DemGrid)
        Tile identifiers ``"r{row}c{col}"`` with their mosaics, in key order.
    """
    tiles = []
    for row, col in sorted(catalog):
        window = [
            [catalog.get((row, col)), catalog.get((row, col + 1))],
            [catalog.get((row + 1, col)), catalog.get((row + 1, col + 1))],
        ]
        tiles.append((f"r{row}c{col}", mosaic_tiles(window)))
    return tiles
