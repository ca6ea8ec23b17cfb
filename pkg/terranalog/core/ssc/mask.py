from __future__ import annotations

from typing import Tuple

import numpy as np


class BinaryMask:
    """
    Immutable boolean raster aligned with a source grid.

    Parameters
    ----------
    bits : array_like of bool, shape (rows, cols)
        Set pixels.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits):
        array = np.array(bits, dtype=bool)
        if array.ndim != 2:
            raise ValueError(f"Mask must be 2-D, got {array.ndim}-D.")
        array.setflags(write=False)
        self._bits = array

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def rows(self) -> int:
        return self._bits.shape[0]

    @property
    def cols(self) -> int:
        return self._bits.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self._bits.shape

    @property
    def count(self) -> int:
        return int(self._bits.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return bool(np.array_equal(self._bits, other._bits))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"BinaryMask({self.rows}x{self.cols}, set={self.count})"
