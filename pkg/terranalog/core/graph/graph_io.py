"""
Plain-text terrain graph files.

::

    # terrain-graph v1
    nodes 3
    0 x y z VRM ACR Slope CD DSE VRM_std ACR_std Slope_std CD_std DSE_std
    ...
    edges 2
    0 1
    1 2

Floats use the shortest text that reads back to the same value, so writing a
graph twice gives identical bytes.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import List, Union

import numpy as np

from terranalog.core.graph.terrain_graph import FEATURE_COUNT, TerrainGraph
from terranalog.exception import GraphFormatError

MAGIC = "# terrain-graph v1"
_NODE_FIELDS = 4 + 2 * FEATURE_COUNT

PathLike = Union[str, os.PathLike]


def format_graph(graph: TerrainGraph) -> str:
    lines = [MAGIC, f"nodes {graph.node_count}"]
    for i in range(graph.node_count):
        values = [
            *graph.positions[i].tolist(),
            float(graph.elevations[i]),
            *graph.raw_features[i].tolist(),
            *graph.features[i].tolist(),
        ]
        lines.append(" ".join([str(i), *(repr(v) for v in values)]))
    lines.append(f"edges {graph.edge_count}")
    lines.extend(f"{i} {j}" for i, j in graph.edges.tolist())
    return "\n".join(lines) + "\n"


def write_graph(graph: TerrainGraph, path: PathLike) -> None:
    Path(path).write_text(format_graph(graph), encoding="utf-8")


def _count(path, lines: List[str], index: int, keyword: str) -> int:
    if index >= len(lines):
        raise GraphFormatError(path, index + 1, f"missing {keyword} section")
    tokens = lines[index].split()
    if len(tokens) != 2 or tokens[0] != keyword or not tokens[1].isdigit():
        raise GraphFormatError(path, index + 1, f"expected '{keyword} <count>'")
    return int(tokens[1])


def read_graph(path: PathLike) -> TerrainGraph:
    """
    Read a graph written by :func:`write_graph`.

    Raises
    ------
    GraphFormatError
        For a missing header, a wrong field count or a non-numeric value.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise GraphFormatError(path, 1, f"expected header {MAGIC!r}")
    n = _count(path, lines, 1, "nodes")
    table = np.empty((n, _NODE_FIELDS))
    for k in range(n):
        line_no = 2 + k
        if line_no >= len(lines):
            raise GraphFormatError(path, line_no + 1, f"expected {n} node rows")
        tokens = lines[line_no].split()
        if len(tokens) != _NODE_FIELDS + 1 or tokens[0] != str(k):
            raise GraphFormatError(path, line_no + 1, f"malformed node row {k}")
        try:
            table[k] = [float(t) for t in tokens[1:]]
        except ValueError:
            raise GraphFormatError(
                path, line_no + 1, "non-numeric node value"
            ) from None
    cursor = 2 + n
    m = _count(path, lines, cursor, "edges")
    edges = np.empty((m, 2), dtype=np.int64)
    for k in range(m):
        line_no = cursor + 1 + k
        if line_no >= len(lines):
            raise GraphFormatError(path, line_no + 1, f"expected {m} edge rows")
        tokens = lines[line_no].split()
        if len(tokens) != 2 or not all(t.isdigit() for t in tokens):
            raise GraphFormatError(path, line_no + 1, "malformed edge row")
        edges[k] = [int(t) for t in tokens]
    return TerrainGraph(
        positions=table[:, 0:2],
        elevations=table[:, 2],
        raw_features=table[:, 3 : 3 + FEATURE_COUNT],
        edges=edges,
        features=table[:, 3 + FEATURE_COUNT :],
    )
