from __future__ import annotations

import copy
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from terranalog.config import ModelConfig
from terranalog.core.enum import Mode
from terranalog.core.graph.terrain_graph import TerrainGraph
from terranalog.core.msgnet.gcn import gcn_backward, gcn_forward, sigmoid
from terranalog.core.msgnet.mlp import mlp_backward, mlp_forward, update_running_stats
from terranalog.core.msgnet.params import GcnParams, Gradients, MlpParams
from terranalog.exception import ModelError

BCE_EPS = 1e-7

GraphPair = Tuple[TerrainGraph, TerrainGraph]


def bce_loss(scores, labels, eps: float = BCE_EPS) -> float:
    """
    Mean binary cross-entropy with scores clamped to ``[eps, 1 - eps]``.

    Examples
    --------
    >>> round(bce_loss([0.9, 0.2], [1, 0]), 4)
    0.1643
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if s.shape != y.shape:
        raise ModelError(f"{s.size} scores for {y.size} labels.")
    if s.size == 0:
        raise ModelError("Loss of an empty batch is undefined.")
    c = np.clip(s, eps, 1.0 - eps)
    return float(np.mean(-(y * np.log(c) + (1.0 - y) * np.log(1.0 - c))))


def bce_logit_gradient(scores, labels, eps: float = BCE_EPS) -> np.ndarray:
    """Gradient of :func:`bce_loss` with respect to the logits; zero where clamped."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    clamped = (s < eps) | (s > 1.0 - eps)
    return np.where(clamped, 0.0, (s - y) / s.size)


class SiameseModel:
    """
    Twin graph encoders with shared weights and a discriminator on
    ``|emb_1 - emb_2|``.

    Parameters
    ----------
    gcn : GcnParams
        Shared encoder.
    mlp : MlpParams
        Discriminator.
    """

    def __init__(self, gcn: GcnParams, mlp: MlpParams):
        gcn.validate()
        mlp.validate()
        if mlp.weights[0].shape[0] != gcn.hidden:
            raise ModelError(
                f"Discriminator input {mlp.weights[0].shape[0]} does not match "
                f"embedding size {gcn.hidden}."
            )
        self.gcn = gcn
        self.mlp = mlp

    @classmethod
    def initialize(
        cls, config: Optional[ModelConfig] = None, seed: int = 0
    ) -> SiameseModel:
        config = config or ModelConfig()
        rng = np.random.default_rng(seed)
        return cls(GcnParams.initialize(config, rng), MlpParams.initialize(config, rng))

    @classmethod
    def distance_head(
        cls,
        config: Optional[ModelConfig] = None,
        seed: int = 0,
        scale: float = 1.0,
        bias: float = 2.0,
    ) -> SiameseModel:
        """
        Untrained baseline whose score is ``sigmoid(bias - |F|_1 / scale)``.

        The encoder is randomly initialized from ``seed``; the discriminator
        is hand-set so the first hidden unit carries the L1 norm of the fused
        embedding through both hidden layers. The score therefore decreases
        strictly with embedding distance, and a pair of identical graphs
        always scores highest.
        """
        model = cls.initialize(config, seed)
        mlp = model.mlp
        for i in range(mlp.hidden_layers):
            mlp.weights[i][:] = 0.0
            if i == 0:
                mlp.weights[i][:, 0] = 1.0
            else:
                mlp.weights[i][0, 0] = 1.0
            mlp.biases[i][:] = 0.0
            mlp.gamma[i][:] = 1.0
            mlp.beta[i][:] = 0.0
            mlp.running_mean[i][:] = 0.0
            mlp.running_var[i][:] = 1.0 - mlp.eps
        mlp.weights[-1][:] = 0.0
        if mlp.hidden_layers:
            mlp.weights[-1][0, 0] = -1.0 / scale
        else:
            mlp.weights[-1][:, 0] = -1.0 / scale
        mlp.biases[-1][:] = bias
        return model

    def named_parameters(self) -> List[Tuple[str, np.ndarray]]:
        """Trainable arrays by name; updating them in place updates the model."""
        named = [(f"gcn.w{i + 1}", w) for i, w in enumerate(self.gcn.weights)]
        named.append(("gcn.score", self.gcn.score))
        for i, (w, b) in enumerate(zip(self.mlp.weights, self.mlp.biases)):
            named.append((f"mlp.w{i + 1}", w))
            named.append((f"mlp.b{i + 1}", b))
        for i, (g, b) in enumerate(zip(self.mlp.gamma, self.mlp.beta)):
            named.append((f"mlp.gamma{i + 1}", g))
            named.append((f"mlp.beta{i + 1}", b))
        return named

    def named_buffers(self) -> List[Tuple[str, np.ndarray]]:
        named = []
        for i, (m, v) in enumerate(zip(self.mlp.running_mean, self.mlp.running_var)):
            named.append((f"mlp.running_mean{i + 1}", m))
            named.append((f"mlp.running_var{i + 1}", v))
        return named

    def state(self) -> Dict[str, np.ndarray]:
        named = self.named_parameters() + self.named_buffers()
        return {name: value.copy() for name, value in named}

    def load_state(self, state: Dict[str, np.ndarray]) -> None:
        for name, value in self.named_parameters() + self.named_buffers():
            if name not in state:
                raise ModelError(f"State is missing {name}.")
            if state[name].shape != value.shape:
                raise ModelError(
                    f"{name} has shape {state[name].shape}, expected {value.shape}."
                )
            value[...] = state[name]

    def copy(self) -> SiameseModel:
        return copy.deepcopy(self)

    def embed(self, graph: TerrainGraph) -> np.ndarray:
        """Eval-mode embedding of one graph."""
        embedding, _ = gcn_forward(graph, self.gcn, Mode.EVAL)
        return embedding

    def score_embeddings(self, first: np.ndarray, second: np.ndarray) -> np.ndarray:
        """Eval-mode scores for rows of two embedding batches."""
        fused = np.abs(np.atleast_2d(first) - np.atleast_2d(second))
        logits, _, _ = mlp_forward(fused, self.mlp, Mode.EVAL)
        return sigmoid(logits)

    def score(self, g1: TerrainGraph, g2: TerrainGraph) -> float:
        """Similarity probability of two graphs in evaluation mode."""
        return float(self.score_embeddings(self.embed(g1), self.embed(g2))[0])

    def score_pairs(self, pairs: Sequence[GraphPair]) -> np.ndarray:
        if not pairs:
            return np.empty(0)
        first = np.stack([self.embed(a) for a, _ in pairs])
        second = np.stack([self.embed(b) for _, b in pairs])
        return self.score_embeddings(first, second)

    def loss_and_gradients(
        self,
        pairs: Sequence[GraphPair],
        labels: Sequence[int],
        mode: Mode = Mode.TRAIN,
        rng: Optional[np.random.Generator] = None,
        update_stats: bool = True,
    ) -> Tuple[float, Gradients]:
        """
        Batch BCE loss and its exact gradients for every trainable parameter.

        The subgradient of ``|x|`` at 0 is taken as 0, so identical embeddings
        send no gradient to the encoder.
        """
        if not pairs:
            raise ModelError("Cannot compute gradients of an empty batch.")
        caches, first, second = [], [], []
        for a, b in pairs:
            emb_a, cache_a = gcn_forward(a, self.gcn, mode, rng)
            emb_b, cache_b = gcn_forward(b, self.gcn, mode, rng)
            first.append(emb_a)
            second.append(emb_b)
            caches.append((cache_a, cache_b))
        diff = np.stack(first) - np.stack(second)
        logits, mlp_cache, stats = mlp_forward(np.abs(diff), self.mlp, mode, rng)
        scores = sigmoid(logits)
        loss = bce_loss(scores, labels)

        grads = Gradients()
        d_logits = bce_logit_gradient(scores, labels)
        d_fused = mlp_backward(d_logits, mlp_cache, self.mlp, grads)
        d_diff = d_fused * np.sign(diff)
        for row, (cache_a, cache_b) in enumerate(caches):
            gcn_backward(d_diff[row], cache_a, self.gcn, grads)
            gcn_backward(-d_diff[row], cache_b, self.gcn, grads)
        ordered = Gradients(
            {
                name: grads.values.get(name, np.zeros_like(value))
                for name, value in self.named_parameters()
            }
        )
        if stats is not None and update_stats:
            update_running_stats(self.mlp, stats)
        return loss, ordered
