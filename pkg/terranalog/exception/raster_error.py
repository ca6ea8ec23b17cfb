from __future__ import annotations

import os
from typing import Optional, Union

from terranalog.exception.terranalog_error import TerranalogError


class GridFormatError(TerranalogError):
    """
    Exception raised when a grid file cannot be parsed.

    Parameters
    ----------
    path : str or os.PathLike
        The file being read.
    line : int, optional
        One-based line number of the offending text, when known.
    reason : str
        What was wrong with the input.
    """

    def __init__(
        self,
        path: Union[str, os.PathLike],
        line: Optional[int],
        reason: str,
    ):
        self.path = os.fspath(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {reason}")


class ExtentError(TerranalogError):
    """Exception raised when a box, point or valley falls outside a grid."""


class MosaicError(TerranalogError):
    """Exception raised for incompatible or inconsistent mosaic members."""
