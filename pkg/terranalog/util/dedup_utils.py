from __future__ import annotations

from typing import List, Sequence

from terranalog.core.ssc.candidate import ValleyCandidate
from terranalog.util.geometry import box_iou


def deduplicate_candidates(
    candidates: Sequence[ValleyCandidate], iou: float = 0.8
) -> List[ValleyCandidate]:
    """
    Drop candidates whose geographic footprint overlaps a better one by more than
    ``iou``.

    Candidates are visited by ascending fit error (then id), and each is kept
    only if it does not overlap an already kept candidate. The survivors come
    back in their input order.
    """
    ranked = sorted(
        range(len(candidates)),
        key=lambda i: (candidates[i].fit.mse, candidates[i].id),
    )
    kept: List[int] = []
    for index in ranked:
        footprint = candidates[index].raster.footprint
        if all(
            box_iou(footprint, candidates[other].raster.footprint) <= iou
            for other in kept
        ):
            kept.append(index)
    return [candidates[i] for i in sorted(kept)]
