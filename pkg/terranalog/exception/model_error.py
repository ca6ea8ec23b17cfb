from __future__ import annotations

from typing import Optional

from terranalog.exception.terranalog_error import TerranalogError


class ModelError(TerranalogError):
    """Exception raised for shape mismatches, bad checkpoints or unknown features."""


class DatasetError(TerranalogError):
    """
    Exception raised for a malformed pair dataset.

    Parameters
    ----------
    row : int, optional
        One-based data row (header excluded) that caused the error.
    reason : str
        What was wrong with the row.
    """

    def __init__(self, row: Optional[int], reason: str):
        self.row = row
        prefix = f"Row {row}: " if row is not None else ""
        super().__init__(f"{prefix}{reason}")
