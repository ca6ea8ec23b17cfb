from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from terranalog.exception import ModelError

THRESHOLD = 0.5


@dataclass(frozen=True)
class ClassificationMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def f1_from(precision: float, recall: float) -> float:
    """
    Harmonic mean of precision and recall, 0 when both are 0.

    Examples
    --------
    >>> round(f1_from(0.7665, 0.9805), 4)
    0.8604
    """
    total = precision + recall
    return 2.0 * precision * recall / total if total > 0 else 0.0


def metrics(tp: int, fp: int, fn: int, tn: int) -> ClassificationMetrics:
    """
    Accuracy, precision, recall and F1 of a confusion matrix.

    Ratios with an empty denominator are 0.
    """
    if min(tp, fp, fn, tn) < 0:
        raise ModelError("Confusion counts must be non-negative.")
    total = tp + fp + fn + tn
    if total == 0:
        raise ModelError("Metrics of an empty confusion matrix are undefined.")
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return ClassificationMetrics(
        accuracy=(tp + tn) / total,
        precision=precision,
        recall=recall,
        f1=f1_from(precision, recall),
    )


def confusion(
    scores: Sequence[float], labels: Sequence[int], threshold: float = THRESHOLD
) -> Tuple[int, int, int, int]:
    """``(tp, fp, fn, tn)``; a score at or above ``threshold`` predicts a match."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels).astype(bool)
    if s.shape != y.shape:
        raise ModelError(f"{s.size} scores for {y.size} labels.")
    predicted = s >= threshold
    return (
        int(np.sum(predicted & y)),
        int(np.sum(predicted & ~y)),
        int(np.sum(~predicted & y)),
        int(np.sum(~predicted & ~y)),
    )


def score_metrics(
    scores: Sequence[float], labels: Sequence[int], threshold: float = THRESHOLD
) -> ClassificationMetrics:
    return metrics(*confusion(scores, labels, threshold))


def summarize(
    results: Sequence[ClassificationMetrics],
) -> Tuple[ClassificationMetrics, ClassificationMetrics]:
    """Mean and sample standard deviation of each metric over folds."""
    if not results:
        raise ModelError("Nothing to summarize.")
    table = np.array([[r.accuracy, r.precision, r.recall, r.f1] for r in results])
    mean = table.mean(axis=0)
    std = table.std(axis=0, ddof=1) if len(results) > 1 else np.zeros(4)
    return ClassificationMetrics(*mean.tolist()), ClassificationMetrics(*std.tolist())


def format_mean_std(mean: float, std: float) -> str:
    """
    Percent with two decimals.

    Examples
    --------
    >>> format_mean_std(0.8393, 0.0105)
    '83.93 ± 1.05'
    """
    return f"{100.0 * mean:.2f} ± {100.0 * std:.2f}"
