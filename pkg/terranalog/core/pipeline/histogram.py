from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np

from terranalog.exception import StageInputError

HISTOGRAM_COLUMNS = ("bin_start", "bin_end", "count")

# Scores sitting on a bin edge up to float noise count in the upper bin.
_EDGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SimilarityHistogram:
    """
    Left-closed bins of width ``bin_width`` over ``[0, 1]``; 1.0 lands in
    the last bin.

    ``mean`` and ``median`` are ``None`` for an empty score list, and
    ``defined`` is then False.
    """

    bin_width: float
    counts: np.ndarray
    scores: np.ndarray
    mean: Optional[float]
    median: Optional[float]

    @property
    def defined(self) -> bool:
        return self.scores.size > 0

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def edges(self) -> np.ndarray:
        edges = np.arange(self.counts.size + 1) * self.bin_width
        edges[-1] = max(edges[-1], 1.0)
        return edges

    def fraction_below(self, threshold: float) -> Optional[float]:
        if not self.defined:
            return None
        return float(np.mean(self.scores < threshold))

    def to_dict(self, threshold: Optional[float] = None) -> Dict[str, object]:
        summary = {
            "bin_width": self.bin_width,
            "count": int(self.scores.size),
            "defined": self.defined,
            "mean": self.mean,
            "median": self.median,
            "counts": self.counts.tolist(),
        }
        if threshold is not None:
            summary["threshold"] = threshold
            summary["fraction_below"] = self.fraction_below(threshold)
        return summary


def similarity_histogram(
    scores: Sequence[float], bin_width: float
) -> SimilarityHistogram:
    """
    Bin similarity scores and summarize them.

    Examples
    --------
    >>> h = similarity_histogram([0.05, 0.05, 0.95], 0.1)
    >>> h.counts.tolist()
    [2, 0, 0, 0, 0, 0, 0, 0, 0, 1]
    >>> round(h.mean, 2), h.median
    (0.35, 0.05)

    Raises
    ------
    StageInputError
        If ``bin_width`` is not positive or a score lies outside ``[0, 1]``.
    """
    if not bin_width > 0:
        raise StageInputError(f"Bin width must be positive, got {bin_width}.")
    values = np.asarray(scores, dtype=np.float64).ravel()
    bins = max(math.ceil(1.0 / bin_width - _EDGE_TOLERANCE), 1)
    outside = ~((values >= 0.0) & (values <= 1.0))
    if np.any(outside):
        raise StageInputError(
            f"Score {float(values[np.argmax(outside)])!r} is outside [0, 1]."
        )
    index = np.floor(values / bin_width + _EDGE_TOLERANCE).astype(np.int64)
    counts = np.bincount(np.minimum(index, bins - 1), minlength=bins)
    if values.size == 0:
        return SimilarityHistogram(bin_width, counts, values, None, None)
    return SimilarityHistogram(
        bin_width,
        counts,
        values,
        float(np.mean(values)),
        float(np.median(values)),
    )


def write_histogram(
    histogram: SimilarityHistogram, path: Union[str, os.PathLike]
) -> None:
    edges = histogram.edges
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(HISTOGRAM_COLUMNS)
        for i, count in enumerate(histogram.counts.tolist()):
            writer.writerow([repr(float(edges[i])), repr(float(edges[i + 1])), count])
