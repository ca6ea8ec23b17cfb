"""
Turning-angle shape matrices and their eigenshape decomposition.

A profile of ``p`` equidistant points has ``p - 1`` segments. Each segment's
direction is ``atan2(rise, 1)`` with a unit horizontal step, so the angles do
not depend on the source resolution. The shape function keeps the ``p - 2``
turning angles between consecutive segments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from terranalog.core.twc.slicing import SliceSequence
from terranalog.exception import StageInputError


def _wrap(angles: np.ndarray) -> np.ndarray:
    """Map angles into ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - angles, 2.0 * np.pi)


def _turning_angles(profiles: np.ndarray) -> np.ndarray:
    directions = np.arctan2(np.diff(profiles, axis=-1), 1.0)
    return _wrap(np.diff(directions, axis=-1))


def shape_function(profile: np.ndarray) -> np.ndarray:
    """
    Turning angles of a resampled profile.

    Raises
    ------
    StageInputError
        If the profile has fewer than 3 points.

    Examples
    --------
    A straight line of any slope gives all zeros; ``[0, 1, 2, 1, 0]`` gives a
    single negative turn at the vertex.
    """
    profile = np.asarray(profile, dtype=np.float64)
    if profile.ndim != 1 or profile.size < 3:
        raise StageInputError(
            f"Shape function needs a profile of at least 3 points, got {profile.shape}."
        )
    return _turning_angles(profile)


@dataclass(frozen=True)
class ShapeMatrix:
    """``m × n`` turning angles in radians; one row per slice."""

    values: np.ndarray

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


def shape_matrix(seq: SliceSequence) -> ShapeMatrix:
    """Stack the shape function of every slice."""
    if seq.slice_width < 3:
        raise StageInputError(
            f"Shape matrices need slices of at least 3 points, got {seq.slice_width}."
        )
    return ShapeMatrix(_turning_angles(seq.slices))


def shape_matrix_from_rows(rows) -> ShapeMatrix:
    """Shape matrix of a ragged list of profiles, which must share one length."""
    lengths = {len(row) for row in rows}
    if len(lengths) != 1:
        raise StageInputError(f"Profiles have differing lengths: {sorted(lengths)}.")
    return shape_matrix(SliceSequence.from_values(list(rows)))


@dataclass(frozen=True)
class Eigenshape:
    """
    Truncated SVD of a shape matrix.

    Parameters
    ----------
    k_pc : int
        Retained components.
    singular_values : numpy.ndarray
        The ``k_pc`` largest singular values, descending.
    components : numpy.ndarray
        ``k_pc × n`` right singular vectors.
    left_vectors : numpy.ndarray
        ``m × k_pc`` left singular vectors.
    spectrum : numpy.ndarray
        Every singular value, descending.
    """

    k_pc: int
    singular_values: np.ndarray
    components: np.ndarray
    left_vectors: np.ndarray
    spectrum: np.ndarray

    @property
    def explained_variance(self) -> float:
        energy = self.spectrum**2
        return float(energy[: self.k_pc].sum() / energy.sum())

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.components


def svd_truncate(
    M: ShapeMatrix, variance_keep: float = 0.80, k_pc: Optional[int] = None
) -> Eigenshape:
    """
    Keep the leading singular triplets of ``M``.

    ``k_pc`` defaults to the smallest ``k`` whose squared singular values
    cover at least ``variance_keep`` of the total. Passing ``k_pc`` pins it.

    Raises
    ------
    StageInputError
        If ``M`` is all zeros, or a pinned ``k_pc`` exceeds ``min(m, n)``.
    """
    values = np.asarray(M.values, dtype=np.float64)
    if not np.any(values):
        raise StageInputError("Cannot decompose an all-zero shape matrix.")
    u, sigma, vt = np.linalg.svd(values, full_matrices=False)
    if k_pc is None:
        energy = np.cumsum(sigma**2) / np.sum(sigma**2)
        k_pc = int(np.searchsorted(energy, variance_keep - 1e-12) + 1)
        k_pc = min(k_pc, sigma.size)
    elif not 1 <= k_pc <= sigma.size:
        raise StageInputError(
            f"k_pc={k_pc} outside the {sigma.size} available components."
        )
    return Eigenshape(
        k_pc=k_pc,
        singular_values=sigma[:k_pc],
        components=vt[:k_pc],
        left_vectors=u[:, :k_pc],
        spectrum=sigma,
    )
