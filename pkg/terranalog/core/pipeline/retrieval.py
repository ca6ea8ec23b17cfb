from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from terranalog.core.enum import Stage
from terranalog.core.graph.terrain_graph import TerrainGraph
from terranalog.core.msgnet.siamese import SiameseModel
from terranalog.exception import StageInputError
from terranalog.util.timing import timed_stage

_logger = logging.getLogger(__name__)

NamedGraph = Tuple[str, TerrainGraph]


@dataclass(frozen=True)
class RankedCandidate:
    id: str
    score: float
    rank: int

    def to_row(self) -> dict:
        return {"id": self.id, "score": self.score, "rank": self.rank}


def rank_scores(ids: Sequence[str], scores: Sequence[float]) -> List[RankedCandidate]:
    """
    Sort by score descending; equal scores go to the lower id.

    Examples
    --------
    >>> [c.id for c in rank_scores(["a", "b", "c"], [0.1, 0.9, 0.4])]
    ['b', 'c', 'a']
    """
    if len(ids) != len(scores):
        raise StageInputError(f"{len(ids)} ids for {len(scores)} scores.")
    values = [float(s) for s in scores]
    if any(math.isnan(v) for v in values):
        raise StageInputError("Scores must not be NaN.")
    order = sorted(range(len(ids)), key=lambda i: (-values[i], ids[i]))
    return [
        RankedCandidate(id=ids[i], score=values[i], rank=rank)
        for rank, i in enumerate(order, start=1)
    ]


def _embed_all(
    model: SiameseModel, graphs: Sequence[TerrainGraph], workers: int
) -> np.ndarray:
    if workers > 1 and len(graphs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return np.stack(list(pool.map(model.embed, graphs)))
    return np.stack([model.embed(graph) for graph in graphs])


def score_against(
    graphs: Sequence[TerrainGraph], ref: TerrainGraph, model, workers: int = 1
) -> np.ndarray:
    """
    Score every graph against ``ref``.

    A :class:`SiameseModel` embeds the reference once and each graph once.
    Any other scorer needs a ``score(g1, g2)`` method and is called per pair.
    """
    if not graphs:
        return np.empty(0)
    if isinstance(model, SiameseModel):
        embeddings = _embed_all(model, graphs, workers)
        return model.score_embeddings(embeddings, model.embed(ref))
    return np.array([model.score(graph, ref) for graph in graphs], dtype=np.float64)


@timed_stage(Stage.MSGNET)
def rank_candidates(
    candidates: Sequence[NamedGraph], ref: TerrainGraph, model, workers: int = 1
) -> List[RankedCandidate]:
    """Score candidates against the reference graph and rank them."""
    scores = score_against([g for _, g in candidates], ref, model, workers)
    ranking = rank_scores([name for name, _ in candidates], scores)
    _logger.info("Ranked %d candidates by graph similarity", len(ranking))
    return ranking


def retrieve(
    candidates: Sequence[NamedGraph], ref: TerrainGraph, model, workers: int = 1
) -> RankedCandidate:
    """
    The candidate whose graph the model scores most similar to ``ref``.

    Raises
    ------
    StageInputError
        If ``candidates`` is empty.
    """
    if not candidates:
        raise StageInputError("Cannot retrieve from an empty candidate set.")
    return rank_candidates(candidates, ref, model, workers)[0]


def pairwise_distances(
    candidates: Sequence[NamedGraph], model, workers: int = 1
) -> Tuple[List[str], np.ndarray]:
    """
    Topographic distance ``1 - score`` between every pair of candidates.

    The matrix is symmetric with a zero diagonal.
    """
    ids = [name for name, _ in candidates]
    n = len(candidates)
    distances = np.zeros((n, n))
    if n < 2:
        return ids, distances
    graphs = [g for _, g in candidates]
    if isinstance(model, SiameseModel):
        embeddings = _embed_all(model, graphs, workers)
        for i in range(n - 1):
            scores = model.score_embeddings(embeddings[i + 1 :], embeddings[i])
            distances[i, i + 1 :] = 1.0 - scores
    else:
        for i in range(n - 1):
            for j in range(i + 1, n):
                distances[i, j] = 1.0 - model.score(graphs[i], graphs[j])
    distances = np.triu(distances, 1)
    return ids, distances + distances.T


def write_distance_matrix(
    ids: Sequence[str], distances: np.ndarray, path: Union[str, os.PathLike]
) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", *ids])
        for name, row in zip(ids, distances.tolist()):
            writer.writerow([name, *(repr(float(v)) for v in row)])
