"""
Flat little-endian binary containers.

``TGRD`` grid layout::

    magic      4s   b"TGRD"
    version    u16
    rows       u32
    cols       u32
    cell_mm    u32  cell size in millimeters
    cell_ndeg  u32  cell size in nanodegrees, 0 for projected grids
    origin     2*f64
    nodata     f32
    payload    rows*cols f32, row-major

``TMAT`` matrix layout::

    magic      4s   b"TMAT"
    version    u16
    rows       u32
    cols       u32
    payload    rows*cols f64, row-major
"""

from __future__ import annotations

import os
import struct
from pathlib import Path
from typing import Union

import numpy as np

from terranalog.core.raster.dem_grid import DemGrid
from terranalog.exception import GridFormatError

PathLike = Union[str, os.PathLike]

GRID_MAGIC = b"TGRD"
MATRIX_MAGIC = b"TMAT"
VERSION = 1

_GRID_HEADER = struct.Struct("<4sH4I2df")
_MATRIX_HEADER = struct.Struct("<4sH2I")


def write_binary_grid(grid: DemGrid, path: PathLike) -> None:
    nanodegrees = 0 if grid.cell_degrees is None else round(grid.cell_degrees * 1e9)
    header = _GRID_HEADER.pack(
        GRID_MAGIC,
        VERSION,
        grid.rows,
        grid.cols,
        round(grid.cell_size * 1000),
        nanodegrees,
        grid.origin[0],
        grid.origin[1],
        grid.nodata_value,
    )
    payload = grid.filled(grid.nodata_value).astype("<f4").tobytes()
    Path(path).write_bytes(header + payload)


def read_binary_grid(path: PathLike) -> DemGrid:
    data = Path(path).read_bytes()
    if len(data) < _GRID_HEADER.size:
        raise GridFormatError(path, None, "truncated header")
    magic, version, rows, cols, cell_mm, cell_ndeg, x0, y0, nodata = (
        _GRID_HEADER.unpack_from(data)
    )
    if magic != GRID_MAGIC:
        raise GridFormatError(path, None, f"bad magic {magic!r}")
    if version != VERSION:
        raise GridFormatError(path, None, f"unsupported version {version}")
    if rows < 1 or cols < 1 or cell_mm < 1:
        raise GridFormatError(path, None, f"invalid dimensions {rows}x{cols}")
    expected = _GRID_HEADER.size + rows * cols * 4
    if len(data) != expected:
        raise GridFormatError(
            path, None, f"payload size {len(data)} does not match {expected}"
        )
    values = np.frombuffer(data, dtype="<f4", offset=_GRID_HEADER.size)
    return DemGrid(
        values.astype(np.float64).reshape(rows, cols),
        cell_size=cell_mm / 1000.0,
        origin=(x0, y0),
        nodata_value=float(nodata),
        cell_degrees=cell_ndeg / 1e9 if cell_ndeg else None,
    )


def write_binary_matrix(matrix: np.ndarray, path: PathLike) -> None:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if matrix.ndim != 2:
        raise ValueError(f"Expected a 2-D matrix, got {matrix.ndim}-D.")
    header = _MATRIX_HEADER.pack(MATRIX_MAGIC, VERSION, *matrix.shape)
    Path(path).write_bytes(header + matrix.astype("<f8").tobytes())


def read_binary_matrix(path: PathLike) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _MATRIX_HEADER.size:
        raise GridFormatError(path, None, "truncated header")
    magic, version, rows, cols = _MATRIX_HEADER.unpack_from(data)
    if magic != MATRIX_MAGIC:
        raise GridFormatError(path, None, f"bad magic {magic!r}")
    if version != VERSION:
        raise GridFormatError(path, None, f"unsupported version {version}")
    expected = _MATRIX_HEADER.size + rows * cols * 8
    if len(data) != expected:
        raise GridFormatError(
            path, None, f"payload size {len(data)} does not match {expected}"
        )
    values = np.frombuffer(data, dtype="<f8", offset=_MATRIX_HEADER.size)
    return values.reshape(rows, cols).copy()
