"""
Derivative dynamic time warping over slice sequences.

Sequences are compared through their along-axis derivatives, so a constant
elevation offset between two valleys does not change the cost. The warping
path is unconstrained: steps (1, 0), (0, 1) and (1, 1), from the first pair of
slices to the last, with no window and no step penalty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from terranalog.core.twc.slicing import SliceSequence
from terranalog.exception import StageInputError


@dataclass(frozen=True)
class DdtwScore:
    forward: float
    reverse: float

    @property
    def cost(self) -> float:
        return min(self.forward, self.reverse)


def slice_derivative(seq: SliceSequence) -> SliceSequence:
    """
    Three-point derivative estimate along the sequence, element-wise per slice.

    Interior slices use ``((q[i] - q[i-1]) + (q[i+1] - q[i-1]) / 2) / 2``; the
    first and last copy their interior neighbour.

    Examples
    --------
    Scalar slices ``[0, 1, 4, 9]`` give ``[1.5, 1.5, 3.5, 3.5]``.
    """
    q = seq.slices
    if len(q) < 3:
        raise StageInputError(
            f"Derivatives need at least 3 slices, the sequence has {len(q)}."
        )
    derivative = np.empty_like(q)
    derivative[1:-1] = ((q[1:-1] - q[:-2]) + (q[2:] - q[:-2]) / 2.0) / 2.0
    derivative[0] = derivative[1]
    derivative[-1] = derivative[-2]
    return SliceSequence(derivative, seq.slice_width, seq.along_spacing)


def warping_cost(distances: np.ndarray) -> float:
    """Minimal monotone path sum through a local distance matrix."""
    n, m = distances.shape
    table = np.full((n + 1, m + 1), np.inf)
    table[0, 0] = 0.0
    # Cells on one anti-diagonal only depend on the two before it.
    for k in range(2, n + m + 1):
        i = np.arange(max(1, k - m), min(n, k - 1) + 1)
        j = k - i
        best = np.minimum(
            np.minimum(table[i - 1, j], table[i, j - 1]), table[i - 1, j - 1]
        )
        table[i, j] = distances[i - 1, j - 1] + best
    return float(table[n, m])


def ddtw_cost(a: SliceSequence, b: SliceSequence) -> float:
    """
    Unconstrained DDTW cost between two slice sequences.

    The local distance is the Euclidean norm between derivative slices; the
    cost is not normalized by slice width or path length.

    Raises
    ------
    StageInputError
        If the slice widths differ or either sequence has fewer than 3 slices.
    """
    if a.slice_width != b.slice_width:
        raise StageInputError(
            f"Slice widths differ: {a.slice_width} vs {b.slice_width}."
        )
    da = slice_derivative(a).slices
    db = slice_derivative(b).slices
    return warping_cost(cdist(da, db, metric="euclidean"))


def bidirectional_ddtw(a: SliceSequence, b: SliceSequence) -> DdtwScore:
    """DDTW cost of ``a`` against ``b`` in both along-axis orientations of ``a``."""
    return DdtwScore(forward=ddtw_cost(a, b), reverse=ddtw_cost(a.reversed(), b))
