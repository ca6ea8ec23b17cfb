"""
Graph encoder.

Each layer propagates with the normalized Laplacian, ``H' = ReLU(L H W)``,
followed by dropout in training. After the last layer a top-k gate keeps the
``ceil(pool_ratio * n)`` best-scoring nodes, scales them by the sigmoid of
their score and averages them into the graph embedding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from terranalog.core.enum import Mode
from terranalog.core.graph.terrain_graph import TerrainGraph
from terranalog.core.msgnet.params import GcnParams, Gradients
from terranalog.exception import ModelError


def sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=np.float64)))


@dataclass
class GcnCache:
    """Forward intermediates needed by :func:`gcn_backward`."""

    graph: TerrainGraph
    propagated: List[np.ndarray]
    pre_activations: List[np.ndarray]
    masks: List[Optional[np.ndarray]]
    hidden: np.ndarray
    selected: np.ndarray
    gate: np.ndarray


def pooled_count(n: int, ratio: float) -> int:
    return max(1, min(n, math.ceil(ratio * n - 1e-9)))


def gcn_forward(
    graph: TerrainGraph,
    params: GcnParams,
    mode: Mode = Mode.EVAL,
    rng: Optional[np.random.Generator] = None,
):
    """
    Encode a graph into one embedding vector.

    Parameters
    ----------
    graph : TerrainGraph
        Graph with standardized features.
    params : GcnParams
        Encoder weights.
    mode : Mode
        ``TRAIN`` applies dropout with ``rng``; ``EVAL`` is deterministic.
    rng : numpy.random.Generator, optional
        Dropout stream, required in training when dropout is positive.

    Returns
    -------
    embedding : numpy.ndarray
        ``(hidden,)`` graph embedding.
    cache : GcnCache
        Intermediates for the backward pass.
    """
    features = graph.features
    if features.shape[1] != params.in_features:
        raise ModelError(
            f"Graph has {features.shape[1]} feature channels, encoder expects "
            f"{params.in_features}."
        )
    if graph.node_count == 0:
        raise ModelError("Cannot encode an empty graph.")
    dropping = mode == Mode.TRAIN and params.dropout > 0
    if dropping and rng is None:
        raise ModelError("Training-mode dropout needs a random generator.")

    laplacian = graph.laplacian
    h = features
    propagated, pre_activations, masks = [], [], []
    for weight in params.weights:
        p = laplacian @ h
        z = p @ weight
        h = np.maximum(z, 0.0)
        mask = None
        if dropping:
            keep = 1.0 - params.dropout
            mask = (rng.random(h.shape) < keep) / keep
            h = h * mask
        propagated.append(p)
        pre_activations.append(z)
        masks.append(mask)

    scores = h @ params.score
    k = pooled_count(graph.node_count, params.pool_ratio)
    selected = np.argsort(-scores, kind="stable")[:k]
    gate = sigmoid(scores[selected])
    embedding = (h[selected] * gate[:, None]).mean(axis=0)
    cache = GcnCache(graph, propagated, pre_activations, masks, h, selected, gate)
    return embedding, cache


def gcn_backward(
    d_embedding: np.ndarray, cache: GcnCache, params: GcnParams, grads: Gradients
) -> None:
    """Accumulate encoder gradients for one forward pass into ``grads``."""
    h, selected, gate = cache.hidden, cache.selected, cache.gate
    k = len(selected)
    d_pooled = np.broadcast_to(d_embedding / k, (k, h.shape[1]))

    d_hidden = np.zeros_like(h)
    d_hidden[selected] += d_pooled * gate[:, None]
    d_gate = np.sum(d_pooled * h[selected], axis=1)
    d_scores = np.zeros(h.shape[0])
    d_scores[selected] = d_gate * gate * (1.0 - gate)
    grads.add("gcn.score", h.T @ d_scores)
    d_hidden += np.outer(d_scores, params.score)

    laplacian = cache.graph.laplacian
    for layer in reversed(range(len(params.weights))):
        mask = cache.masks[layer]
        d_act = d_hidden if mask is None else d_hidden * mask
        d_z = d_act * (cache.pre_activations[layer] > 0)
        grads.add(f"gcn.w{layer + 1}", cache.propagated[layer].T @ d_z)
        if layer:
            # The Laplacian is symmetric, so it is its own transpose.
            d_hidden = laplacian @ (d_z @ params.weights[layer].T)


def node_activations(graph: TerrainGraph, params: GcnParams) -> np.ndarray:
    """Eval-mode last-layer hidden vectors, ``(n, hidden)``."""
    _, cache = gcn_forward(graph, params, Mode.EVAL)
    return cache.hidden
