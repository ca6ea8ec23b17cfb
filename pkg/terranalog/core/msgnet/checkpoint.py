"""
Model checkpoints.

Layout, little-endian::

    magic     4s   b"MSGN"
    version   u16
    count     u32  number of tensors
    then per tensor:
      name_len  u16
      name      utf-8
      ndim      u8
      dims      ndim * u32
      payload   prod(dims) f64, row-major

Hyper-parameters the arrays do not imply (dropout rates, pooling ratio,
batch-norm momentum and epsilon) are stored as 0-d tensors under ``meta.``.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path
from typing import Dict, Union

import numpy as np

from terranalog.core.msgnet.params import GcnParams, MlpParams
from terranalog.core.msgnet.siamese import SiameseModel
from terranalog.exception import ModelError

MAGIC = b"MSGN"
VERSION = 1

_HEADER = struct.Struct("<4sHI")

PathLike = Union[str, os.PathLike]


def _tensors(model: SiameseModel) -> Dict[str, np.ndarray]:
    tensors = model.state()
    tensors["meta.gcn_dropout"] = np.array(model.gcn.dropout)
    tensors["meta.pool_ratio"] = np.array(model.gcn.pool_ratio)
    tensors["meta.mlp_dropout"] = np.array(model.mlp.dropout)
    tensors["meta.bn_momentum"] = np.array(model.mlp.momentum)
    tensors["meta.bn_eps"] = np.array(model.mlp.eps)
    return tensors


def save_checkpoint(model: SiameseModel, path: PathLike) -> None:
    tensors = _tensors(model)
    chunks = [_HEADER.pack(MAGIC, VERSION, len(tensors))]
    for name, value in tensors.items():
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded)) + encoded)
        chunks.append(struct.pack(f"<B{value.ndim}I", value.ndim, *value.shape))
        chunks.append(np.ascontiguousarray(value, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(chunks))


def _read_tensors(path: PathLike) -> Dict[str, np.ndarray]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ModelError(f"{path}: truncated checkpoint header")
    magic, version, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ModelError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ModelError(f"{path}: unsupported checkpoint version {version}")
    offset = _HEADER.size
    tensors = {}
    try:
        for _ in range(count):
            (length,) = struct.unpack_from("<H", data, offset)
            offset += 2
            name = data[offset : offset + length].decode("utf-8")
            offset += length
            (ndim,) = struct.unpack_from("<B", data, offset)
            offset += 1
            shape = struct.unpack_from(f"<{ndim}I", data, offset)
            offset += 4 * ndim
            size = int(np.prod(shape)) if ndim else 1
            if offset + 8 * size > len(data):
                raise ModelError(f"{path}: tensor {name} is truncated")
            values = np.frombuffer(data, dtype="<f8", count=size, offset=offset)
            tensors[name] = values.reshape(shape).astype(np.float64)
            offset += 8 * size
    except (struct.error, UnicodeDecodeError) as e:
        raise ModelError(f"{path}: corrupt checkpoint ({e})") from e
    if offset != len(data):
        raise ModelError(f"{path}: {len(data) - offset} trailing bytes")
    return tensors


def _layer_list(tensors: Dict[str, np.ndarray], prefix: str) -> list:
    layers = []
    while f"{prefix}{len(layers) + 1}" in tensors:
        layers.append(tensors[f"{prefix}{len(layers) + 1}"].copy())
    return layers


def load_checkpoint(path: PathLike) -> SiameseModel:
    """
    Rebuild a model saved by :func:`save_checkpoint`.

    Raises
    ------
    ModelError
        For a wrong magic or version, truncated data or missing tensors.
    """
    tensors = _read_tensors(path)
    try:
        gcn = GcnParams(
            weights=_layer_list(tensors, "gcn.w"),
            score=tensors["gcn.score"].copy(),
            dropout=float(tensors["meta.gcn_dropout"]),
            pool_ratio=float(tensors["meta.pool_ratio"]),
        )
        mlp = MlpParams(
            weights=_layer_list(tensors, "mlp.w"),
            biases=_layer_list(tensors, "mlp.b"),
            gamma=_layer_list(tensors, "mlp.gamma"),
            beta=_layer_list(tensors, "mlp.beta"),
            running_mean=_layer_list(tensors, "mlp.running_mean"),
            running_var=_layer_list(tensors, "mlp.running_var"),
            dropout=float(tensors["meta.mlp_dropout"]),
            momentum=float(tensors["meta.bn_momentum"]),
            eps=float(tensors["meta.bn_eps"]),
        )
    except KeyError as e:
        raise ModelError(f"{path}: checkpoint is missing tensor {e.args[0]}") from None
    if not gcn.weights or not mlp.weights:
        raise ModelError(f"{path}: checkpoint holds no layers")
    return SiameseModel(gcn, mlp)
