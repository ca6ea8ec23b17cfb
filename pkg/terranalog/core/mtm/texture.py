from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from terranalog.core.enum import Stage
from terranalog.core.mtm.eigenshape import (
    Eigenshape,
    ShapeMatrix,
    shape_matrix,
    svd_truncate,
)
from terranalog.core.mtm.resample import choose_target_resolution, resample_sequence
from terranalog.core.ssc.candidate import ValleyCandidate
from terranalog.core.twc.slicing import SliceSequence, slice_decompose
from terranalog.exception import StageInputError
from terranalog.util.timing import timed_stage

_logger = logging.getLogger(__name__)

MTM_COLUMNS = ("id", "similarity", "rank")


@dataclass(frozen=True)
class LoadingMatrix:
    """``k_pc × n`` principal component loadings of one terrain."""

    values: np.ndarray

    @property
    def k_pc(self) -> int:
        return self.values.shape[0]

    def flat(self) -> np.ndarray:
        return self.values.ravel()


def loading_matrix(
    cand_shape: ShapeMatrix, ref_components: np.ndarray, k_pc: Optional[int] = None
) -> LoadingMatrix:
    """
    Express a candidate's shape matrix in the reference eigenshape basis.

    Every candidate row is projected onto each reference component; row ``j``
    of the result is component ``j`` scaled by the mean coefficient over rows.

    Raises
    ------
    StageInputError
        If the shape matrix width differs from the component dimension.
    """
    components = np.atleast_2d(np.asarray(ref_components, dtype=np.float64))
    k_pc = components.shape[0] if k_pc is None else k_pc
    if not 1 <= k_pc <= components.shape[0]:
        raise StageInputError(
            f"k_pc={k_pc} outside the {components.shape[0]} components."
        )
    if cand_shape.n != components.shape[1]:
        raise StageInputError(
            f"Shape matrix has {cand_shape.n} columns, components have "
            f"{components.shape[1]}."
        )
    basis = components[:k_pc]
    coefficients = (cand_shape.values @ basis.T).mean(axis=0)
    return LoadingMatrix(coefficients[:, None] * basis)


def cosine_similarity(a: LoadingMatrix, b: LoadingMatrix) -> Optional[float]:
    """Cosine of the flattened matrices; ``None`` when either norm is zero."""
    x, y = a.flat(), b.flat()
    if x.shape != y.shape:
        raise StageInputError(
            f"Loading shapes differ: {a.values.shape} vs {b.values.shape}."
        )
    norms = np.linalg.norm(x) * np.linalg.norm(y)
    if norms == 0:
        return None
    return float(np.clip(x @ y / norms, -1.0, 1.0))


@dataclass(frozen=True)
class TextureMatch:
    candidate: ValleyCandidate
    similarity: float
    rank: int

    def to_row(self) -> dict:
        return {
            "id": self.candidate.id,
            "similarity": self.similarity,
            "rank": self.rank,
        }


def cosine_rank(
    candidates: Sequence[Tuple[ValleyCandidate, Optional[LoadingMatrix]]],
    ref_loading: LoadingMatrix,
    keep: int = 1000,
) -> List[TextureMatch]:
    """
    Rank candidates by cosine similarity of their loadings to the reference.

    Candidates with a zero-norm or missing loading score 0 and rank after all
    others. Ties are broken by candidate id.
    """
    if keep < 1:
        raise StageInputError(f"keep must be at least 1, got {keep}.")
    scored = []
    for candidate, loading in candidates:
        similarity = (
            None if loading is None else cosine_similarity(loading, ref_loading)
        )
        degenerate = similarity is None
        scored.append((degenerate, 0.0 if degenerate else similarity, candidate))
    scored.sort(key=lambda item: (item[0], -item[1], item[2].id))
    return [
        TextureMatch(candidate=candidate, similarity=similarity, rank=rank)
        for rank, (_, similarity, candidate) in enumerate(scored[:keep], start=1)
    ]


@dataclass(frozen=True)
class ReferenceTexture:
    """The reference's resolution, eigenshape and loading, shared by all candidates."""

    target_n: int
    slice_width: int
    eigenshape: Eigenshape
    loading: LoadingMatrix

    def loading_for(self, seq: SliceSequence) -> LoadingMatrix:
        resampled = resample_sequence(seq, self.target_n)
        return loading_matrix(
            shape_matrix(resampled), self.eigenshape.components, self.eigenshape.k_pc
        )


def fit_reference_texture(
    ref: SliceSequence,
    bound: float = 0.015,
    variance_keep: float = 0.80,
    k_pc: Optional[int] = None,
) -> ReferenceTexture:
    """Choose the resolution and decompose the reference shape matrix."""
    # A shape needs at least one turning angle.
    target_n = max(choose_target_resolution(ref, bound), 3)
    ref_shape = shape_matrix(resample_sequence(ref, target_n))
    eigenshape = svd_truncate(ref_shape, variance_keep=variance_keep, k_pc=k_pc)
    loading = loading_matrix(ref_shape, eigenshape.components, eigenshape.k_pc)
    _logger.info(
        "Reference texture: %d points per slice, k_pc=%d (%.1f%% variance)",
        target_n,
        eigenshape.k_pc,
        100.0 * eigenshape.explained_variance,
    )
    return ReferenceTexture(
        target_n=target_n,
        slice_width=ref.slice_width,
        eigenshape=eigenshape,
        loading=loading,
    )


def _candidate_loading(
    candidate: ValleyCandidate, texture: ReferenceTexture, spacing: Optional[float]
) -> Optional[LoadingMatrix]:
    try:
        seq = slice_decompose(candidate, width=texture.slice_width, spacing=spacing)
        return texture.loading_for(seq)
    except StageInputError as e:
        _logger.info("Candidate %s has no texture loading: %s", candidate.id, e.message)
        return None


def rank_by_texture(
    candidates: Sequence[ValleyCandidate],
    texture: ReferenceTexture,
    spacing: Optional[float] = None,
    workers: int = 1,
) -> List[TextureMatch]:
    """Full texture ranking of ``candidates``."""
    if workers > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            loadings = list(
                pool.map(lambda c: _candidate_loading(c, texture, spacing), candidates)
            )
    else:
        loadings = [_candidate_loading(c, texture, spacing) for c in candidates]
    return cosine_rank(
        list(zip(candidates, loadings)), texture.loading, keep=max(len(candidates), 1)
    )


@timed_stage(Stage.MTM)
def mtm_filter(
    candidates: Sequence[ValleyCandidate],
    texture: ReferenceTexture,
    keep: int = 1000,
    spacing: Optional[float] = None,
    workers: int = 1,
) -> List[TextureMatch]:
    """Keep the ``keep`` candidates whose loading best matches the reference."""
    if keep < 1:
        raise StageInputError(f"keep must be at least 1, got {keep}.")
    ranking = rank_by_texture(candidates, texture, spacing=spacing, workers=workers)
    kept = ranking[:keep]
    _logger.info("Texture matching kept %d of %d candidates", len(kept), len(ranking))
    return kept
