from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np
from scipy import ndimage

from terranalog.core.ssc.candidate import LineFit, assemble_fit
from terranalog.core.ssc.mask import BinaryMask
from terranalog.core.ssc.thinning import EIGHT_CONNECTED
from terranalog.exception import StageInputError
from terranalog.util.geometry import perpendicular_distance


@dataclass(frozen=True)
class Skeleton:
    """An 8-connected set of ``(row, col)`` pixels, sorted in raster order."""

    pixels: np.ndarray
    component_id: int

    def __len__(self) -> int:
        return len(self.pixels)


def connected_components(mask: BinaryMask) -> List[Skeleton]:
    """
    Split the set pixels of ``mask`` into maximal 8-connected components.

    Components are numbered from 0 in order of their first pixel in raster
    order, which is their lexicographically smallest ``(row, col)``.
    """
    labels, count = ndimage.label(mask.bits, structure=EIGHT_CONNECTED)
    if count == 0:
        return []
    coords = np.argwhere(labels > 0)
    owners = labels[coords[:, 0], coords[:, 1]]
    # argwhere is already raster ordered; a stable sort keeps that within a label.
    order = np.argsort(owners, kind="stable")
    coords, owners = coords[order], owners[order]
    bounds = np.flatnonzero(np.diff(owners)) + 1
    groups = np.split(coords, bounds)
    groups.sort(key=lambda pixels: (int(pixels[0, 0]), int(pixels[0, 1])))
    return [Skeleton(pixels=pixels, component_id=i) for i, pixels in enumerate(groups)]


def fit_skeleton_line(skel: Skeleton) -> LineFit:
    """
    Total-least-squares line through the skeleton pixels.

    The direction is the principal eigenvector of the 2×2 coordinate
    covariance, so vertical skeletons fit as well as horizontal ones.

    Raises
    ------
    StageInputError
        If the skeleton has fewer than two pixels.

    Examples
    --------
    Pixels ``(0, 0), (1, 1), (2, 2)`` fit with ``mse == 0`` and
    ``length == 2 * sqrt(2)``.
    """
    if len(skel) < 2:
        raise StageInputError(
            f"Skeleton {skel.component_id} needs at least 2 pixels, has {len(skel)}."
        )
    points = skel.pixels.astype(np.float64)
    centroid = points.mean(axis=0)
    centered = points - centroid
    covariance = centered.T @ centered / len(points)
    _, vectors = np.linalg.eigh(covariance)
    direction = vectors[:, -1]
    if direction[1] < 0 or (direction[1] == 0 and direction[0] < 0):
        direction = -direction

    offsets = perpendicular_distance(points, centroid, centroid + direction)
    mse = float(np.mean(offsets**2))
    projections = centered @ direction
    start = centroid + projections.min() * direction
    end = centroid + projections.max() * direction
    length = float(projections.max() - projections.min())
    return assemble_fit(start, end, direction, length, mse)
