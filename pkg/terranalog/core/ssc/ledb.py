from __future__ import annotations

import logging

import numpy as np

from terranalog.core.raster.dem_grid import DemGrid
from terranalog.core.ssc.mask import BinaryMask
from terranalog.exception import StageInputError

_logger = logging.getLogger(__name__)


def _window_sums(values: np.ndarray, half: int) -> np.ndarray:
    """Sum over the ``(2 half + 1)²`` window at every cell, truncated at the edges."""
    rows, cols = values.shape
    table = np.zeros((rows + 1, cols + 1))
    table[1:, 1:] = values.cumsum(axis=0).cumsum(axis=1)
    r_lo = np.clip(np.arange(rows) - half, 0, rows)
    r_hi = np.clip(np.arange(rows) + half + 1, 0, rows)
    c_lo = np.clip(np.arange(cols) - half, 0, cols)
    c_hi = np.clip(np.arange(cols) + half + 1, 0, cols)
    return (
        table[np.ix_(r_hi, c_hi)]
        - table[np.ix_(r_lo, c_hi)]
        - table[np.ix_(r_hi, c_lo)]
        + table[np.ix_(r_lo, c_lo)]
    )


def _centered_means(grid: DemGrid, blk: int):
    valid = grid.valid_mask
    # Centering keeps the summed-area table well conditioned for large grids.
    shift = float(grid.valid_elevations().mean()) if valid.any() else 0.0
    values = np.where(valid, grid.elevations - shift, 0.0)
    half = blk // 2
    sums = _window_sums(values, half)
    counts = _window_sums(valid.astype(np.float64), half)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(counts > 0, sums / counts, np.nan)
    return values, mean, shift


def local_mean(grid: DemGrid, blk: int) -> np.ndarray:
    """
    Mean of valid elevations in the ``blk × blk`` window around every cell.

    Windows are truncated at the grid edges and skip nodata cells. Cells whose
    window holds no valid value get ``nan``.
    """
    _, mean, shift = _centered_means(grid, blk)
    return mean + shift


def ledb_binarize(grid: DemGrid, blk: int = 33, c: float = 50.0) -> BinaryMask:
    """
    Local elevation deficit binarization.

    A pixel is set when its elevation lies more than ``c`` meters below the
    mean of its ``blk × blk`` neighbourhood. Nodata pixels are never set and
    never contribute to a mean.

    Parameters
    ----------
    grid : DemGrid
        The tile to screen.
    blk : int
        Odd window size in pixels, at least 3.
    c : float
        Deficit threshold in meters, positive.

    Returns
    -------
    BinaryMask
        Mask with the grid's dimensions.

    Examples
    --------
    A 5×5 grid of 100 m with a 0 m center and ``blk=5``, ``c=50`` sets only
    the center: its window mean is 96 m.
    """
    if blk < 3 or blk % 2 == 0:
        raise StageInputError(f"Window size must be odd and at least 3, got {blk}.")
    if not c > 0:
        raise StageInputError(f"Deficit threshold must be positive, got {c}.")

    values, mean, _ = _centered_means(grid, blk)
    with np.errstate(invalid="ignore"):
        bits = values < mean - c
    bits &= grid.valid_mask
    _logger.debug("LEDB blk=%d c=%.1f set %d pixels", blk, c, int(bits.sum()))
    return BinaryMask(bits)
