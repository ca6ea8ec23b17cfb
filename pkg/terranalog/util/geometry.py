"""Planar geometry helpers shared by the screening and graph stages."""

from __future__ import annotations

from typing import Tuple

import numpy as np


def perpendicular_distance(
    points: np.ndarray, start: np.ndarray, end: np.ndarray
) -> np.ndarray:
    """
    Compute perpendicular distances from *points* to the line through
    *start* and *end*.

    Parameters
    ----------
    points : np.ndarray, shape (N, 2)
        The points to measure.
    start, end : np.ndarray, shape (2,)
        Two distinct points on the reference line.

    Returns
    -------
    np.ndarray, shape (N,)
        Distance of each point to the line; distance to *start* when the two
        points coincide.
    """
    line_vec = np.asarray(end, dtype=np.float64) - start
    line_len = np.linalg.norm(line_vec)
    if line_len == 0:
        return np.linalg.norm(points - start, axis=1)
    line_unit = line_vec / line_len
    diff = points - start
    return np.abs(diff[:, 0] * line_unit[1] - diff[:, 1] * line_unit[0])


def clip_segments_to_disk(
    starts: np.ndarray, ends: np.ndarray, center: np.ndarray, radius: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Clip segments to a disk.

    Parameters
    ----------
    starts, ends : np.ndarray, shape (S, 2)
        Segment endpoints.
    center : np.ndarray, shape (2,)
        Disk center.
    radius : float
        Disk radius.

    Returns
    -------
    lengths : np.ndarray, shape (S,)
        Length of each segment inside the disk, zero when it misses.
    azimuths : np.ndarray, shape (S,)
        Undirected direction of each segment in ``[0, pi)``.
    """
    vectors = ends - starts
    offsets = starts - center
    a = np.einsum("ij,ij->i", vectors, vectors)
    b = 2.0 * np.einsum("ij,ij->i", offsets, vectors)
    c = np.einsum("ij,ij->i", offsets, offsets) - radius * radius
    disc = b * b - 4.0 * a * c
    lengths = np.zeros(len(starts))
    hit = (a > 0) & (disc > 0)
    if hit.any():
        root = np.sqrt(disc[hit])
        t_lo = np.clip((-b[hit] - root) / (2.0 * a[hit]), 0.0, 1.0)
        t_hi = np.clip((-b[hit] + root) / (2.0 * a[hit]), 0.0, 1.0)
        lengths[hit] = np.clip(t_hi - t_lo, 0.0, None) * np.sqrt(a[hit])
    azimuths = np.mod(np.arctan2(vectors[:, 1], vectors[:, 0]), np.pi)
    return lengths, azimuths


def box_iou(
    first: Tuple[float, float, float, float], second: Tuple[float, float, float, float]
) -> float:
    """Intersection over union of two ``(x_min, y_min, x_max, y_max)`` boxes."""
    ix = max(0.0, min(first[2], second[2]) - max(first[0], second[0]))
    iy = max(0.0, min(first[3], second[3]) - max(first[1], second[1]))
    inter = ix * iy
    area_a = (first[2] - first[0]) * (first[3] - first[1])
    area_b = (second[2] - second[0]) * (second[3] - second[1])
    union = area_a + area_b - inter
    return inter / union if union > 0 else 0.0
