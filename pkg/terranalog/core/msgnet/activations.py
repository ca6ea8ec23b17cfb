from __future__ import annotations

import csv
import os
from pathlib import Path
from typing import Union

import numpy as np

from terranalog.core.graph.terrain_graph import TerrainGraph
from terranalog.core.msgnet.gcn import node_activations
from terranalog.core.msgnet.params import GcnParams

ACTIVATION_COLUMNS = ("node", "x", "y", "intensity")


def export_activations(graph: TerrainGraph, gcn: GcnParams) -> np.ndarray:
    """
    Per-node activation intensity of the last encoder layer.

    The intensity is the L2 norm of each node's hidden vector, min-max scaled
    to ``[0, 1]``. Constant norms, all-zero ones included, map to 0.
    """
    norms = np.linalg.norm(node_activations(graph, gcn), axis=1)
    low, high = norms.min(), norms.max()
    if high - low <= 0:
        return np.zeros_like(norms)
    return (norms - low) / (high - low)


def write_activations(
    graph: TerrainGraph, intensities: np.ndarray, path: Union[str, os.PathLike]
) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(ACTIVATION_COLUMNS)
        for i, ((x, y), value) in enumerate(zip(graph.positions.tolist(), intensities)):
            writer.writerow([i, repr(x), repr(y), repr(float(value))])
