"""
Planar Delaunay edges for contour nodes.

Triangulation is delegated to Qhull. Where four nodes are cocircular either
diagonal is valid; the configuration whose sorted triangle list is
lexicographically smaller is kept, so the edge set depends only on node order.
Collinear input has no triangulation and falls back to a chain along the line.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Tuple

import numpy as np
from scipy.spatial import Delaunay, QhullError

from terranalog.exception import StageInputError

_logger = logging.getLogger(__name__)

_COCIRCULAR_TOL = 1e-10


def _edges_of(triangles: np.ndarray) -> np.ndarray:
    pairs = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [0, 2]]]
    )
    pairs.sort(axis=1)
    return np.unique(pairs, axis=0)


def chain_edges(points: np.ndarray) -> np.ndarray:
    """Edges between consecutive points ordered along their principal axis."""
    centered = points - points.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    order = np.lexsort((np.arange(len(points)), centered @ vt[0]))
    edges = np.column_stack([order[:-1], order[1:]])
    edges.sort(axis=1)
    return np.unique(edges, axis=0)


def _incircle(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> float:
    """Positive when ``d`` is inside the circumcircle of counter-clockwise ``abc``."""
    rows = np.array([a - d, b - d, c - d])
    matrix = np.column_stack([rows, (rows**2).sum(axis=1)])
    return float(np.linalg.det(matrix))


def _orient(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _cocircular(points: np.ndarray, quad: Tuple[int, int, int, int]) -> bool:
    a, b, c, d = (points[i] for i in quad)
    if _orient(a, b, c) < 0:
        a, b = b, a
    scale = np.ptp(points[list(quad)], axis=0).max()
    return abs(_incircle(a, b, c, d)) <= _COCIRCULAR_TOL * scale**4


def _flippable(points: np.ndarray, a: int, b: int, c: int, d: int) -> bool:
    """``abc`` and ``abd`` form a convex quad whose other diagonal is ``cd``."""
    pa, pb, pc, pd = points[a], points[b], points[c], points[d]
    return (
        _orient(pc, pd, pa) * _orient(pc, pd, pb) < 0
        and _orient(pa, pb, pc) * _orient(pa, pb, pd) < 0
    )


def _break_ties(
    points: np.ndarray, triangles: List[Tuple[int, ...]]
) -> List[Tuple[int, ...]]:
    triangles = [tuple(sorted(t)) for t in triangles]
    changed = True
    while changed:
        changed = False
        owners: Dict[Tuple[int, int], List[int]] = {}
        for index, tri in enumerate(triangles):
            for edge in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])):
                owners.setdefault(edge, []).append(index)
        for (a, b), pair in sorted(owners.items()):
            if len(pair) != 2:
                continue
            first, second = triangles[pair[0]], triangles[pair[1]]
            c = next(v for v in first if v not in (a, b))
            d = next(v for v in second if v not in (a, b))
            if not _cocircular(points, (a, b, c, d)):
                continue
            if not _flippable(points, a, b, c, d):
                continue
            current = sorted([first, second])
            flipped = sorted([tuple(sorted((c, d, a))), tuple(sorted((c, d, b)))])
            if flipped < current:
                triangles[pair[0]], triangles[pair[1]] = flipped
                changed = True
                break
    return triangles


def delaunay_triangles(points: np.ndarray) -> np.ndarray:
    """Delaunay triangles as sorted index triples, with cocircular ties resolved."""
    points = np.asarray(points, dtype=np.float64)
    if len(points) < 3:
        raise StageInputError(
            f"Triangulation needs at least 3 nodes, got {len(points)}."
        )
    triangulation = Delaunay(points)
    triangles = _break_ties(points, [tuple(t) for t in triangulation.simplices])
    return np.array(sorted(triangles), dtype=np.int64)


def delaunay(points: np.ndarray) -> np.ndarray:
    """
    Undirected Delaunay edges ``(i, j)`` with ``i < j``, sorted.

    Raises
    ------
    StageInputError
        If there are fewer than 3 nodes.

    Examples
    --------
    The four corners of a unit square give its four sides and one diagonal.
    """
    points = np.asarray(points, dtype=np.float64)
    if len(points) < 3:
        raise StageInputError(
            f"Triangulation needs at least 3 nodes, got {len(points)}."
        )
    centered = points - points.mean(axis=0)
    spread = np.linalg.svd(centered, compute_uv=False)
    if spread[-1] <= 1e-12 * max(spread[0], 1.0):
        _logger.info("Nodes are collinear; using chain edges")
        return chain_edges(points)
    try:
        triangles = delaunay_triangles(points)
    except QhullError as e:
        _logger.warning("Triangulation failed (%s); using chain edges", e)
        return chain_edges(points)
    return _edges_of(triangles)
