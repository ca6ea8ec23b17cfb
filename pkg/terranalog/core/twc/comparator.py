from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

from terranalog.core.enum import Stage
from terranalog.core.ssc.candidate import ValleyCandidate
from terranalog.core.twc.ddtw import DdtwScore, bidirectional_ddtw
from terranalog.core.twc.slicing import SliceSequence, slice_decompose
from terranalog.exception import StageInputError
from terranalog.util.timing import timed_stage

_logger = logging.getLogger(__name__)

TWC_COLUMNS = ("id", "forward", "reverse", "min", "rank")


@dataclass(frozen=True)
class WaveformMatch:
    """A candidate with its bidirectional DDTW cost against the reference."""

    candidate: ValleyCandidate
    score: DdtwScore
    rank: int

    @property
    def cost(self) -> float:
        return self.score.cost

    def to_row(self) -> dict:
        return {
            "id": self.candidate.id,
            "forward": self.score.forward,
            "reverse": self.score.reverse,
            "min": self.score.cost,
            "rank": self.rank,
        }


def _score(
    candidate: ValleyCandidate,
    ref: SliceSequence,
    width: int,
    spacing: Optional[float],
) -> DdtwScore:
    try:
        sequence = slice_decompose(candidate, width=width, spacing=spacing)
        return bidirectional_ddtw(sequence, ref)
    except StageInputError as e:
        _logger.info("Candidate %s ranked last: %s", candidate.id, e.message)
        return DdtwScore(forward=math.inf, reverse=math.inf)


def rank_by_waveform(
    candidates: Sequence[ValleyCandidate],
    ref: SliceSequence,
    spacing: Optional[float] = None,
    workers: int = 1,
) -> List[WaveformMatch]:
    """
    Score every candidate against ``ref`` and sort ascending by cost, then id.

    Candidates that cannot be sliced, or yield fewer than three slices, get an
    infinite cost and sort last.
    """
    width = ref.slice_width
    if workers > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(
                pool.map(lambda cand: _score(cand, ref, width, spacing), candidates)
            )
    else:
        scores = [_score(cand, ref, width, spacing) for cand in candidates]

    order = sorted(
        range(len(candidates)), key=lambda i: (scores[i].cost, candidates[i].id)
    )
    return [
        WaveformMatch(candidate=candidates[i], score=scores[i], rank=rank)
        for rank, i in enumerate(order, start=1)
    ]


@timed_stage(Stage.TWC)
def twc_filter(
    candidates: Sequence[ValleyCandidate],
    ref: SliceSequence,
    keep: int = 5000,
    spacing: Optional[float] = None,
    workers: int = 1,
) -> List[WaveformMatch]:
    """
    Keep the ``keep`` candidates whose cross-section waveform is closest to ``ref``.

    Parameters
    ----------
    candidates : sequence of ValleyCandidate
        Screened candidates.
    ref : SliceSequence
        Reference slices; candidates are sliced to the same width.
    keep : int
        Number of candidates to return.
    spacing : float, optional
        Candidate slice spacing in meters, one cell by default.
    workers : int
        Thread count for scoring; the result does not depend on it.

    Returns
    -------
    list of WaveformMatch
        The first ``min(keep, len(candidates))`` of the ranking.
    """
    if keep < 1:
        raise StageInputError(f"keep must be at least 1, got {keep}.")
    ranking = rank_by_waveform(candidates, ref, spacing=spacing, workers=workers)
    kept = ranking[:keep]
    _logger.info(
        "Waveform comparison kept %d of %d candidates", len(kept), len(ranking)
    )
    return kept
