from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from terranalog.config import ModelConfig, TrainConfig
from terranalog.core.enum import Mode
from terranalog.core.graph.terrain_graph import TerrainGraph
from terranalog.core.msgnet.metrics import score_metrics
from terranalog.core.msgnet.optim import AdamW, clip_gradients
from terranalog.core.msgnet.pairs import LabeledPair, resolve_pairs
from terranalog.core.msgnet.siamese import SiameseModel, bce_loss
from terranalog.exception import DatasetError

_logger = logging.getLogger(__name__)

HISTORY_COLUMNS = (
    "epoch",
    "train_loss",
    "val_loss",
    "val_f1",
    "grad_norm",
    "clipped_norm",
)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    val_f1: float
    grad_norm: float
    clipped_norm: float


@dataclass
class TrainingResult:
    """
    Outcome of one training run.

    ``model`` holds the parameters of the epoch with the lowest validation
    loss. ``step_norms`` lists ``(before, after)`` clipping norms per step.
    """

    model: SiameseModel
    history: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    step_norms: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def epochs_run(self) -> int:
        return len(self.history)

    def losses(self) -> List[float]:
        return [record.train_loss for record in self.history]


def validation_split(
    pairs: Sequence[LabeledPair], fraction: float, rng: np.random.Generator
) -> Tuple[List[LabeledPair], List[LabeledPair]]:
    """
    Hold out about ``fraction`` of each class for validation.

    A dataset too small to spare a validation pair validates on its
    training pairs.
    """
    labels = np.array([p.label for p in pairs])
    held = []
    for value in (0, 1):
        members = np.flatnonzero(labels == value)
        count = int(round(fraction * len(members)))
        if count >= len(members):
            count = len(members) - 1
        held.extend(members[rng.permutation(len(members))][: max(count, 0)].tolist())
    held_set = set(held)
    train = [p for i, p in enumerate(pairs) if i not in held_set]
    validation = [p for i, p in enumerate(pairs) if i in held_set]
    if not validation or not train:
        return list(pairs), list(pairs)
    return train, validation


def _evaluate(
    model: SiameseModel,
    pairs: Sequence[LabeledPair],
    graphs: Mapping[str, TerrainGraph],
) -> Tuple[float, float]:
    resolved, labels = resolve_pairs(pairs, graphs)
    scores = model.score_pairs(resolved)
    return bce_loss(scores, labels), score_metrics(scores, labels).f1


def _batches(order: np.ndarray, size: int) -> List[np.ndarray]:
    """Consecutive runs of ``size``; a lone trailing pair joins the run before it."""
    starts = list(range(0, len(order), size))
    if len(starts) > 1 and len(order) - starts[-1] == 1:
        starts.pop()
    ends = starts[1:] + [len(order)]
    return [order[start:end] for start, end in zip(starts, ends)]


def train(
    pairs: Sequence[LabeledPair],
    graphs: Mapping[str, TerrainGraph],
    config: Optional[TrainConfig] = None,
    model_config: Optional[ModelConfig] = None,
    validation: Optional[Sequence[LabeledPair]] = None,
    model: Optional[SiameseModel] = None,
) -> TrainingResult:
    """
    Fit a Siamese model with AdamW, gradient clipping and early stopping.

    One generator seeded from ``config.seed`` drives initialization, the
    validation split, the per-epoch shuffle and every dropout mask, so a run
    is reproducible. Training stops once the validation loss has not improved
    for ``config.patience`` epochs, or after ``config.max_epochs``.

    Parameters
    ----------
    pairs : sequence of LabeledPair
        Training pairs.
    graphs : mapping of str to TerrainGraph
        Every graph a pair refers to.
    config : TrainConfig, optional
        Optimizer and schedule.
    model_config : ModelConfig, optional
        Shape of a freshly initialized model.
    validation : sequence of LabeledPair, optional
        Held-out pairs; a stratified split of ``pairs`` by default.
    model : SiameseModel, optional
        Starting parameters; initialized from the seed by default.

    Raises
    ------
    DatasetError
        If fewer than 2 pairs remain for training, or a pair names an
        unknown graph.
    """
    config = config or TrainConfig()
    if not pairs:
        raise DatasetError(None, "cannot train on an empty dataset")
    rng = np.random.default_rng(config.seed)
    if model is None:
        seed = int(rng.integers(0, 2**31 - 1))
        model = SiameseModel.initialize(model_config, seed)
    if validation is None:
        pairs, validation = validation_split(pairs, config.validation_fraction, rng)
    train_graphs, train_labels = resolve_pairs(pairs, graphs)
    resolve_pairs(validation, graphs)
    if len(train_graphs) < 2:
        raise DatasetError(None, "training needs at least 2 pairs")

    optimizer = AdamW(
        model.named_parameters(),
        lr=config.learning_rate,
        weight_decay=config.weight_decay,
    )
    result = TrainingResult(model=model)
    best_loss = math.inf
    best_state = model.state()
    stale = 0
    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(train_graphs))
        total, norms = 0.0, []
        for batch in _batches(order, config.batch_size):
            loss, grads = model.loss_and_gradients(
                [train_graphs[i] for i in batch], train_labels[batch], Mode.TRAIN, rng
            )
            norm = clip_gradients(grads, config.clip_norm)
            optimizer.step(grads)
            norms.append(norm)
            total += loss * len(batch)
        val_loss, val_f1 = _evaluate(model, validation, graphs)
        before = max(n[0] for n in norms)
        after = max(n[1] for n in norms)
        result.step_norms.extend(norms)
        result.history.append(
            EpochRecord(epoch, total / len(order), val_loss, val_f1, before, after)
        )
        _logger.debug(
            "Epoch %d: train %.4f, val %.4f, val F1 %.3f",
            epoch,
            total / len(order),
            val_loss,
            val_f1,
        )
        if val_loss < best_loss:
            best_loss, best_state, stale = val_loss, model.state(), 0
            result.best_epoch = epoch
        else:
            stale += 1
        if stale >= config.patience:
            _logger.info(
                "Early stop after epoch %d; best epoch %d", epoch, result.best_epoch
            )
            break
    model.load_state(best_state)
    return result


def write_history(
    history: Sequence[EpochRecord], path: Union[str, os.PathLike]
) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=HISTORY_COLUMNS)
        writer.writeheader()
        for record in history:
            writer.writerow(asdict(record))
