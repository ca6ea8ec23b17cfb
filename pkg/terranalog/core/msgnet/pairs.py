from __future__ import annotations

from dataclasses import dataclass
from typing import List, Mapping, Sequence, Tuple

import numpy as np

from terranalog.core.graph.terrain_graph import TerrainGraph
from terranalog.exception import DatasetError


@dataclass(frozen=True)
class LabeledPair:
    """Two graph ids and whether the terrains are analogs (1) or not (0)."""

    graph_a: str
    graph_b: str
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise DatasetError(None, f"label must be 0 or 1, got {self.label!r}")


def resolve_pairs(
    pairs: Sequence[LabeledPair], graphs: Mapping[str, TerrainGraph]
) -> Tuple[List[Tuple[TerrainGraph, TerrainGraph]], np.ndarray]:
    """Look up both graphs of every pair; return them with the label vector."""
    resolved = []
    for row, pair in enumerate(pairs, start=1):
        for key in (pair.graph_a, pair.graph_b):
            if key not in graphs:
                raise DatasetError(row, f"unknown graph id {key!r}")
        resolved.append((graphs[pair.graph_a], graphs[pair.graph_b]))
    labels = np.array([pair.label for pair in pairs], dtype=np.int64)
    return resolved, labels


def stratified_folds(
    labels: Sequence[int], folds: int, rng: np.random.Generator
) -> List[np.ndarray]:
    """
    Split indices into ``folds`` groups with near-equal size and label balance.

    Indices are shuffled within each class, the classes concatenated, and
    positions dealt round-robin, so fold sizes differ by at most one and
    every fold's positive count is within one of its share.
    """
    labels = np.asarray(labels)
    ordered = []
    for value in (0, 1):
        members = np.flatnonzero(labels == value)
        ordered.append(members[rng.permutation(len(members))])
    sequence = np.concatenate(ordered)
    return [np.sort(sequence[k::folds]) for k in range(folds)]
