from __future__ import annotations

from typing import List, Tuple

import numpy as np

from terranalog.core.msgnet.params import Gradients


def clip_gradients(grads: Gradients, max_norm: float) -> Tuple[float, float]:
    """
    Scale ``grads`` in place so their global L2 norm is at most ``max_norm``.

    Returns
    -------
    tuple of float
        The norm before and after clipping.
    """
    before = grads.global_norm()
    if before > max_norm:
        grads.scale(max_norm / (before + 1e-6))
    return before, grads.global_norm()


class AdamW:
    """
    Adam with decoupled weight decay, updating arrays in place.

    Decay shrinks every parameter by ``lr * weight_decay`` before the Adam
    step, so it does not pass through the moment estimates.
    """

    def __init__(
        self,
        parameters: List[Tuple[str, np.ndarray]],
        lr: float = 1e-4,
        weight_decay: float = 1e-3,
        betas: Tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        self.parameters = parameters
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.steps = 0
        self._first = {name: np.zeros_like(p) for name, p in parameters}
        self._second = {name: np.zeros_like(p) for name, p in parameters}

    def step(self, grads: Gradients) -> None:
        self.steps += 1
        correction1 = 1.0 - self.beta1**self.steps
        correction2 = 1.0 - self.beta2**self.steps
        for name, param in self.parameters:
            grad = grads[name]
            first = self._first[name]
            second = self._second[name]
            first *= self.beta1
            first += (1.0 - self.beta1) * grad
            second *= self.beta2
            second += (1.0 - self.beta2) * grad * grad
            param *= 1.0 - self.lr * self.weight_decay
            denom = np.sqrt(second / correction2) + self.eps
            param -= self.lr * (first / correction1) / denom
