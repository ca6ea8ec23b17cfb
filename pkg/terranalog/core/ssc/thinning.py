"""
Zhang-Suen thinning.

Neighbours of a pixel P1 are labelled clockwise from north::

    P9 P2 P3
    P8 P1 P4
    P7 P6 P5
"""

from __future__ import annotations

import logging
from typing import List

import numpy as np
from scipy import ndimage

from terranalog.core.ssc.mask import BinaryMask

_logger = logging.getLogger(__name__)

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def _neighbours(image: np.ndarray) -> List[np.ndarray]:
    """P2..P9 for every interior cell of a zero-padded image."""
    return [
        image[:-2, 1:-1],  # P2
        image[:-2, 2:],  # P3
        image[1:-1, 2:],  # P4
        image[2:, 2:],  # P5
        image[2:, 1:-1],  # P6
        image[2:, :-2],  # P7
        image[1:-1, :-2],  # P8
        image[:-2, :-2],  # P9
    ]


def _deletable(image: np.ndarray, first_pass: bool) -> np.ndarray:
    p2, p3, p4, p5, p6, p7, p8, p9 = _neighbours(image)
    ring = [p2, p3, p4, p5, p6, p7, p8, p9, p2]
    b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9
    a = sum((ring[k] == 0) & (ring[k + 1] == 1) for k in range(8))
    if first_pass:
        c = p2 * p4 * p6
        d = p4 * p6 * p8
    else:
        c = p2 * p4 * p8
        d = p2 * p6 * p8
    centre = image[1:-1, 1:-1] == 1
    interior = centre & (b >= 2) & (b <= 6) & (a == 1) & (c == 0) & (d == 0)
    out = np.zeros(image.shape, dtype=bool)
    out[1:-1, 1:-1] = interior
    return out


def _spare_vanishing(image: np.ndarray, delete: np.ndarray) -> np.ndarray:
    """Keep the first pixel (raster order) of any component a sub-pass would erase."""
    labels, count = ndimage.label(image, structure=EIGHT_CONNECTED)
    if count == 0:
        return delete
    total = np.bincount(labels.ravel(), minlength=count + 1)
    removed = np.bincount(labels[delete], minlength=count + 1)
    vanishing = np.flatnonzero((removed == total) & (total > 0))
    vanishing = vanishing[vanishing > 0]
    if vanishing.size == 0:
        return delete
    flat = labels.ravel()
    marked = np.flatnonzero(delete.ravel() & np.isin(flat, vanishing))
    _, first = np.unique(flat[marked], return_index=True)
    spared = delete.copy()
    spared.flat[marked[first]] = False
    return spared


def zhang_suen_thin(mask: BinaryMask) -> BinaryMask:
    """
    Thin a binary mask to one-pixel-wide lines.

    The two Zhang-Suen sub-passes run in parallel over the mask and repeat
    until a full iteration deletes nothing. A component that a sub-pass would
    erase completely (a 2×2 block, for instance) keeps its first pixel in
    raster order, so the number of 8-connected components never changes.

    Parameters
    ----------
    mask : BinaryMask
        The mask to thin.

    Returns
    -------
    BinaryMask
        A subset of ``mask``.
    """
    image = np.pad(mask.bits, 1).astype(np.uint8)
    iterations = 0
    while True:
        changed = False
        for first_pass in (True, False):
            delete = _deletable(image, first_pass)
            if not delete.any():
                continue
            delete = _spare_vanishing(image, delete)
            if delete.any():
                image[delete] = 0
                changed = True
        iterations += 1
        if not changed:
            break
    _logger.debug("Zhang-Suen converged after %d iterations", iterations)
    return BinaryMask(image[1:-1, 1:-1].astype(bool))
