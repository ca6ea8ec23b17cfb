from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Tuple

import numpy as np

from terranalog.config import ModelConfig
from terranalog.exception import ModelError


def _uniform(rng: np.random.Generator, bound: float, shape) -> np.ndarray:
    return rng.uniform(-bound, bound, size=shape)


@dataclass
class GcnParams:
    """
    Shared graph encoder weights.

    ``weights[l]`` maps layer ``l`` inputs to outputs; the encoder has no
    biases. ``score`` ranks nodes for top-k pooling.
    """

    weights: List[np.ndarray]
    score: np.ndarray
    dropout: float = 0.3
    pool_ratio: float = 0.1

    @property
    def in_features(self) -> int:
        return self.weights[0].shape[0]

    @property
    def hidden(self) -> int:
        return self.weights[-1].shape[1]

    def validate(self) -> None:
        for index, (w, nxt) in enumerate(zip(self.weights, self.weights[1:])):
            if w.shape[1] != nxt.shape[0]:
                raise ModelError(
                    f"GCN layer {index + 1} output does not feed layer {index + 2}."
                )
        if self.score.shape != (self.hidden,):
            raise ModelError(
                f"Pooling score has shape {self.score.shape}, "
                f"expected ({self.hidden},)."
            )

    @classmethod
    def initialize(cls, config: ModelConfig, rng: np.random.Generator) -> GcnParams:
        dims = [config.in_features] + [config.hidden] * config.layers
        weights = [
            _uniform(rng, np.sqrt(6.0 / (fan_in + fan_out)), (fan_in, fan_out))
            for fan_in, fan_out in zip(dims, dims[1:])
        ]
        score = _uniform(rng, 1.0 / np.sqrt(config.hidden), config.hidden)
        return cls(weights, score, config.gcn_dropout, config.pool_ratio)


@dataclass
class MlpParams:
    """
    Discriminator weights: ``Linear -> BatchNorm -> ReLU -> Dropout`` per hidden
    layer, then a single-logit output layer.
    """

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    gamma: List[np.ndarray]
    beta: List[np.ndarray]
    running_mean: List[np.ndarray]
    running_var: List[np.ndarray]
    dropout: float = 0.5
    momentum: float = 0.1
    eps: float = 1e-5

    @property
    def hidden_layers(self) -> int:
        return len(self.gamma)

    def validate(self) -> None:
        if len(self.weights) != self.hidden_layers + 1:
            raise ModelError(
                "The discriminator needs one output layer after its hidden layers."
            )
        for w, nxt in zip(self.weights, self.weights[1:]):
            if w.shape[1] != nxt.shape[0]:
                raise ModelError("Discriminator layer sizes do not chain.")
        if self.weights[-1].shape[1] != 1:
            raise ModelError("The discriminator must end in a single logit.")

    @classmethod
    def initialize(cls, config: ModelConfig, rng: np.random.Generator) -> MlpParams:
        dims = [config.hidden, *config.mlp_hidden, 1]
        weights, biases = [], []
        for fan_in, fan_out in zip(dims, dims[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(_uniform(rng, bound, (fan_in, fan_out)))
            biases.append(_uniform(rng, bound, fan_out))
        widths = list(config.mlp_hidden)
        return cls(
            weights=weights,
            biases=biases,
            gamma=[np.ones(w) for w in widths],
            beta=[np.zeros(w) for w in widths],
            running_mean=[np.zeros(w) for w in widths],
            running_var=[np.ones(w) for w in widths],
            dropout=config.mlp_dropout,
            momentum=config.bn_momentum,
            eps=config.bn_eps,
        )


@dataclass
class Gradients:
    """Gradients keyed by parameter name, in the order they were registered."""

    values: Dict[str, np.ndarray] = field(default_factory=dict)

    def add(self, name: str, grad: np.ndarray) -> None:
        if name in self.values:
            self.values[name] = self.values[name] + grad
        else:
            self.values[name] = np.array(grad, dtype=np.float64)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[name]

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        return iter(self.values.items())

    def global_norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(g * g)) for g in self.values.values())))

    def scale(self, factor: float) -> None:
        for name in self.values:
            self.values[name] = self.values[name] * factor
