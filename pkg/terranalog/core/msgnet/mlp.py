from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from terranalog.core.enum import Mode
from terranalog.core.msgnet.params import Gradients, MlpParams
from terranalog.exception import ModelError


@dataclass
class _HiddenCache:
    inputs: np.ndarray
    normalized: np.ndarray
    inv_std: np.ndarray
    pre_activation: np.ndarray
    mask: Optional[np.ndarray]
    batch_stats: bool


@dataclass
class MlpCache:
    layers: List[_HiddenCache]
    last_input: np.ndarray


@dataclass
class BatchStats:
    """Batch means and unbiased variances seen by each hidden layer in training."""

    means: List[np.ndarray]
    variances: List[np.ndarray]


def mlp_forward(
    x: np.ndarray,
    params: MlpParams,
    mode: Mode = Mode.EVAL,
    rng: Optional[np.random.Generator] = None,
):
    """
    Discriminator logits for a batch of fused embeddings.

    Training mode normalizes with batch statistics and applies dropout;
    evaluation mode uses the running statistics, so each row's output does
    not depend on the rest of the batch.

    Returns
    -------
    logits : numpy.ndarray
        ``(B,)`` pre-sigmoid outputs.
    cache : MlpCache
        Intermediates for :func:`mlp_backward`.
    stats : BatchStats or None
        Statistics for the running-average update, training mode only.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != params.weights[0].shape[0]:
        raise ModelError(
            f"Discriminator expects {params.weights[0].shape[0]} inputs, "
            f"got {x.shape[1]}."
        )
    training = mode == Mode.TRAIN
    if training and params.dropout > 0 and rng is None:
        raise ModelError("Training-mode dropout needs a random generator.")
    if training and params.hidden_layers and x.shape[0] < 2:
        raise ModelError(
            f"Training-mode batch norm needs at least 2 rows, got {x.shape[0]}."
        )

    layers, means, variances = [], [], []
    h = x
    for i in range(params.hidden_layers):
        y = h @ params.weights[i] + params.biases[i]
        if training:
            mean = y.mean(axis=0)
            var = y.var(axis=0)
            means.append(mean)
            batch = y.shape[0]
            variances.append(var * batch / (batch - 1))
        else:
            mean, var = params.running_mean[i], params.running_var[i]
        inv_std = 1.0 / np.sqrt(var + params.eps)
        normalized = (y - mean) * inv_std
        pre = params.gamma[i] * normalized + params.beta[i]
        out = np.maximum(pre, 0.0)
        mask = None
        if training and params.dropout > 0:
            keep = 1.0 - params.dropout
            mask = (rng.random(out.shape) < keep) / keep
            out = out * mask
        layers.append(_HiddenCache(h, normalized, inv_std, pre, mask, training))
        h = out
    logits = (h @ params.weights[-1] + params.biases[-1])[:, 0]
    stats = BatchStats(means, variances) if training else None
    return logits, MlpCache(layers, h), stats


def update_running_stats(params: MlpParams, stats: BatchStats) -> None:
    m = params.momentum
    for i, (mean, var) in enumerate(zip(stats.means, stats.variances)):
        params.running_mean[i] = (1.0 - m) * params.running_mean[i] + m * mean
        params.running_var[i] = (1.0 - m) * params.running_var[i] + m * var


def mlp_backward(
    d_logits: np.ndarray, cache: MlpCache, params: MlpParams, grads: Gradients
) -> np.ndarray:
    """Accumulate discriminator gradients; return the gradient of its inputs."""
    last = len(params.weights)
    d_out = np.asarray(d_logits, dtype=np.float64)[:, None]
    grads.add(f"mlp.w{last}", cache.last_input.T @ d_out)
    grads.add(f"mlp.b{last}", d_out.sum(axis=0))
    d_h = d_out @ params.weights[-1].T

    for i in reversed(range(params.hidden_layers)):
        layer = cache.layers[i]
        if layer.mask is not None:
            d_h = d_h * layer.mask
        d_pre = d_h * (layer.pre_activation > 0)
        grads.add(f"mlp.gamma{i + 1}", np.sum(d_pre * layer.normalized, axis=0))
        grads.add(f"mlp.beta{i + 1}", d_pre.sum(axis=0))
        d_norm = d_pre * params.gamma[i]
        if layer.batch_stats:
            batch = d_norm.shape[0]
            d_y = layer.inv_std / batch * (
                batch * d_norm
                - d_norm.sum(axis=0)
                - layer.normalized * np.sum(d_norm * layer.normalized, axis=0)
            )
        else:
            d_y = d_norm * layer.inv_std
        grads.add(f"mlp.w{i + 1}", layer.inputs.T @ d_y)
        grads.add(f"mlp.b{i + 1}", d_y.sum(axis=0))
        d_h = d_y @ params.weights[i].T
    return d_h
