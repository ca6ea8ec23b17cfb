from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Mapping, Optional, Sequence

import numpy as np

from terranalog.config import ModelConfig, TrainConfig
from terranalog.core.graph.terrain_graph import TerrainGraph
from terranalog.core.msgnet.metrics import (
    ClassificationMetrics,
    format_mean_std,
    score_metrics,
    summarize,
)
from terranalog.core.msgnet.pairs import LabeledPair, resolve_pairs, stratified_folds
from terranalog.core.msgnet.trainer import train
from terranalog.exception import DatasetError

_logger = logging.getLogger(__name__)

# (train pairs, held-out pairs) -> anything with score_pairs(graph pairs)
TrainFn = Callable[[Sequence[LabeledPair], Sequence[LabeledPair]], object]


@dataclass(frozen=True)
class FoldResult:
    fold: int
    size: int
    positives: int
    metrics: ClassificationMetrics


@dataclass(frozen=True)
class CrossValidationReport:
    folds: List[FoldResult]
    mean: ClassificationMetrics
    std: ClassificationMetrics

    def formatted(self) -> dict:
        """Metric name to ``"mean ± std"`` in percent."""
        return {
            name: format_mean_std(value, getattr(self.std, name))
            for name, value in self.mean.to_dict().items()
        }

    def to_dict(self) -> dict:
        return {
            "folds": [
                {
                    "fold": f.fold,
                    "size": f.size,
                    "positives": f.positives,
                    **f.metrics.to_dict(),
                }
                for f in self.folds
            ],
            "mean": self.mean.to_dict(),
            "std": self.std.to_dict(),
            "formatted": self.formatted(),
        }


def kfold_evaluate(
    pairs: Sequence[LabeledPair],
    graphs: Mapping[str, TerrainGraph],
    config: Optional[TrainConfig] = None,
    model_config: Optional[ModelConfig] = None,
    folds: Optional[int] = None,
    train_fn: Optional[TrainFn] = None,
) -> CrossValidationReport:
    """
    Stratified k-fold cross-validation at threshold 0.5.

    Each fold trains on the other folds and validates early stopping on the
    held-out fold, which is then scored.

    Parameters
    ----------
    pairs : sequence of LabeledPair
        The whole dataset.
    graphs : mapping of str to TerrainGraph
        Graphs the pairs refer to.
    config : TrainConfig, optional
        Training recipe; ``config.folds`` when ``folds`` is omitted.
    model_config : ModelConfig, optional
        Model shape.
    folds : int, optional
        Number of folds.
    train_fn : callable, optional
        Replaces :func:`train`; called with the training and held-out pairs
        and must return a scorer with ``score_pairs``.

    Raises
    ------
    DatasetError
        If there are fewer pairs than folds.
    """
    config = config or TrainConfig()
    folds = config.folds if folds is None else folds
    if folds < 2:
        raise DatasetError(
            None, f"cross-validation needs at least 2 folds, got {folds}"
        )
    if len(pairs) < folds:
        raise DatasetError(None, f"{len(pairs)} pairs cannot fill {folds} folds")
    if train_fn is None:

        def train_fn(train_pairs, held_out):
            result = train(
                train_pairs, graphs, config, model_config, validation=held_out
            )
            return result.model

    labels = np.array([p.label for p in pairs])
    groups = stratified_folds(labels, folds, np.random.default_rng(config.seed))
    results = []
    for k, test_index in enumerate(groups):
        test_set = set(test_index.tolist())
        held_out = [pairs[i] for i in test_index]
        train_pairs = [p for i, p in enumerate(pairs) if i not in test_set]
        scorer = train_fn(train_pairs, held_out)
        resolved, fold_labels = resolve_pairs(held_out, graphs)
        scores = scorer.score_pairs(resolved)
        fold_metrics = score_metrics(scores, fold_labels)
        _logger.info("Fold %d/%d: F1 %.4f", k + 1, folds, fold_metrics.f1)
        results.append(
            FoldResult(
                fold=k + 1,
                size=len(held_out),
                positives=int(fold_labels.sum()),
                metrics=fold_metrics,
            )
        )
    mean, std = summarize([r.metrics for r in results])
    return CrossValidationReport(folds=results, mean=mean, std=std)
