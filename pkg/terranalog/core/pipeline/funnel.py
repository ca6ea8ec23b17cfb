"""
The three-stage retrieval funnel.

Tiles are screened for straight valleys, filtered by cross-section waveform,
then by cross-section texture, and the survivors are ranked by the Siamese
graph model against the reference. Every stage writes a CSV manifest into
the run directory, and the run ends with ``summary.json``.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from terranalog import __version__
from terranalog.config import GraphConfig, PipelineConfig
from terranalog.core.enum import Stage
from terranalog.core.graph.terrain_graph import TerrainGraph, build_graph
from terranalog.core.msgnet.checkpoint import load_checkpoint
from terranalog.core.mtm.texture import (
    MTM_COLUMNS,
    ReferenceTexture,
    fit_reference_texture,
    mtm_filter,
)
from terranalog.core.pipeline.histogram import (
    SimilarityHistogram,
    similarity_histogram,
    write_histogram,
)
from terranalog.core.pipeline.manifest import (
    SCORE_COLUMNS,
    write_candidates,
    write_manifest,
    write_summary,
)
from terranalog.core.pipeline.retrieval import (
    RankedCandidate,
    rank_candidates,
    score_against,
)
from terranalog.core.raster.binary_format import write_binary_matrix
from terranalog.core.raster.dem_grid import DemGrid
from terranalog.core.raster.reference import ReferenceTrench, reference_candidate
from terranalog.core.ssc.candidate import ValleyCandidate
from terranalog.core.ssc.screening import screen_tiles
from terranalog.core.twc.comparator import TWC_COLUMNS, twc_filter
from terranalog.core.twc.slicing import SliceSequence, slice_decompose
from terranalog.exception import ConfigError, EmptyStageError, StageInputError
from terranalog.util.timing import StageTimer, timed_stage

_logger = logging.getLogger(__name__)

Reference = Union[DemGrid, ValleyCandidate, ReferenceTrench]

SSC_MANIFEST = "ssc.csv"
TWC_MANIFEST = "twc.csv"
MTM_MANIFEST = "mtm.csv"
RANKING_MANIFEST = "ranking.csv"
COMPONENTS_FILE = "reference_components.tmat"
SUMMARY_FILE = "summary.json"


@dataclass
class PipelineResult:
    """Final ranking of one funnel run plus what the summary reports."""

    ranking: List[RankedCandidate]
    stage_sizes: Dict[str, int]
    timings: Dict[str, float]
    output_dir: Path
    discarded: Dict[str, SimilarityHistogram] = field(default_factory=dict)

    @property
    def best(self) -> RankedCandidate:
        return self.ranking[0]


def as_reference_candidate(reference: Reference) -> ValleyCandidate:
    """A reference trench, as a candidate with its axis along the long side."""
    if isinstance(reference, ValleyCandidate):
        return reference
    if isinstance(reference, ReferenceTrench):
        return reference.as_candidate()
    if isinstance(reference, DemGrid):
        return reference_candidate(reference)
    raise TypeError(f"Unsupported reference type: {type(reference).__name__}")


def reference_slices(reference: Reference, config: PipelineConfig) -> SliceSequence:
    return slice_decompose(
        as_reference_candidate(reference),
        width=config.twc.width,
        spacing=config.twc.reference_spacing,
    )


def reference_texture(
    slices: SliceSequence, config: PipelineConfig
) -> ReferenceTexture:
    return fit_reference_texture(
        slices,
        bound=config.mtm.bound,
        variance_keep=config.mtm.variance_keep,
        k_pc=config.mtm.k_pc,
    )


def _try_build(
    candidate: ValleyCandidate, config: GraphConfig
) -> Optional[Tuple[str, TerrainGraph]]:
    try:
        return candidate.id, build_graph(candidate.raster, config)
    except StageInputError as e:
        _logger.info("Candidate %s has no graph: %s", candidate.id, e.message)
        return None


def build_candidate_graphs(
    candidates: Sequence[ValleyCandidate], config: GraphConfig, workers: int = 1
) -> List[Tuple[str, TerrainGraph]]:
    """Graphs of the candidates that yield one, in input order."""
    if workers > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            built = list(pool.map(lambda c: _try_build(c, config), candidates))
    else:
        built = [_try_build(c, config) for c in candidates]
    return [item for item in built if item is not None]


@timed_stage(Stage.MSGNET)
def _graphs_for_scoring(
    candidates: Sequence[ValleyCandidate],
    reference: ValleyCandidate,
    config: PipelineConfig,
) -> Tuple[TerrainGraph, List[Tuple[str, TerrainGraph]]]:
    ref_graph = build_graph(reference.raster, config.reference_graph)
    return ref_graph, build_candidate_graphs(candidates, config.graph, config.workers)


def _resolve_model(model, config: PipelineConfig):
    if model is not None:
        return model
    if config.checkpoint:
        return load_checkpoint(config.checkpoint)
    raise ConfigError(
        "No trained model: set checkpoint in the configuration or pass a model."
    )


def _score_discarded(
    groups: Dict[str, Sequence[ValleyCandidate]],
    ref_graph: TerrainGraph,
    model,
    config: PipelineConfig,
    output_dir: Path,
) -> Dict[str, SimilarityHistogram]:
    histograms = {}
    combined: List[float] = []
    for stage, candidates in groups.items():
        graphs = build_candidate_graphs(candidates, config.graph, config.workers)
        scores = score_against([g for _, g in graphs], ref_graph, model, config.workers)
        combined.extend(scores.tolist())
        histograms[stage] = similarity_histogram(scores, config.histogram_bin_width)
    histograms["combined"] = similarity_histogram(combined, config.histogram_bin_width)
    for name, histogram in histograms.items():
        write_histogram(histogram, output_dir / f"discarded_{name}.csv")
        below = histogram.fraction_below(config.histogram_threshold)
        if below is not None:
            _logger.info(
                "Discarded by %s: %d scored, %.1f%% below %.2f",
                name,
                histogram.total,
                100.0 * below,
                config.histogram_threshold,
            )
    return histograms


def run_pipeline(
    tiles: Sequence[Tuple[str, DemGrid]],
    reference: Reference,
    config: Optional[PipelineConfig] = None,
    model=None,
    candidates: Optional[Sequence[ValleyCandidate]] = None,
) -> PipelineResult:
    """
    Run the funnel end to end.

    Parameters
    ----------
    tiles : sequence of (str, DemGrid)
        Tile ids and mosaics to screen.
    reference : DemGrid, ValleyCandidate or ReferenceTrench
        The reference trench. A bare grid is taken along its long side.
    config : PipelineConfig, optional
        Run settings; manifests go to ``config.output_dir``.
    model : optional
        A :class:`SiameseModel`, or any object with ``score(g1, g2)``.
        Loaded from ``config.checkpoint`` when omitted.
    candidates : sequence of ValleyCandidate, optional
        Pre-screened candidates; screening is skipped when given.

    Returns
    -------
    PipelineResult
        Candidates ranked by similarity, best first.

    Raises
    ------
    EmptyStageError
        Naming the first stage that produced nothing.
    ConfigError
        If no model is given and no checkpoint is configured.
    """
    config = (config or PipelineConfig()).validate()
    model = _resolve_model(model, config)
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    ref = as_reference_candidate(reference)
    timer = StageTimer()
    sizes: Dict[str, int] = {}

    with timer.activate():
        if candidates is None:
            candidates = screen_tiles(tiles, config.ssc, config.workers)
        candidates = list(candidates)
        if not candidates:
            raise EmptyStageError(Stage.SSC, "No straight valley passed screening.")
        sizes[Stage.SSC.value] = write_candidates(candidates, output_dir / SSC_MANIFEST)

        ref_slices = reference_slices(ref, config)
        waveform = twc_filter(
            candidates,
            ref_slices,
            keep=config.twc_keep,
            spacing=config.twc.spacing,
            workers=config.workers,
        )
        waveform = [match for match in waveform if math.isfinite(match.cost)]
        if not waveform:
            raise EmptyStageError(Stage.TWC, "No candidate could be sliced.")
        sizes[Stage.TWC.value] = write_manifest(
            (match.to_row() for match in waveform),
            TWC_COLUMNS,
            output_dir / TWC_MANIFEST,
        )

        texture = reference_texture(ref_slices, config)
        write_binary_matrix(texture.eigenshape.components, output_dir / COMPONENTS_FILE)
        textured = mtm_filter(
            [match.candidate for match in waveform],
            texture,
            keep=config.mtm_keep,
            spacing=config.twc.spacing,
            workers=config.workers,
        )
        if not textured:
            raise EmptyStageError(Stage.MTM)
        sizes[Stage.MTM.value] = write_manifest(
            (match.to_row() for match in textured),
            MTM_COLUMNS,
            output_dir / MTM_MANIFEST,
        )

        finalists = [match.candidate for match in textured]
        ref_graph, graphs = _graphs_for_scoring(finalists, ref, config)
        if not graphs:
            raise EmptyStageError(Stage.MSGNET, "No finalist yields a terrain graph.")
        ranking = rank_candidates(graphs, ref_graph, model, config.workers)
        sizes[Stage.MSGNET.value] = write_manifest(
            (entry.to_row() for entry in ranking),
            SCORE_COLUMNS,
            output_dir / RANKING_MANIFEST,
        )

    discarded = {}
    if config.score_discarded:
        kept_twc = {match.candidate.id for match in waveform}
        kept_mtm = {candidate.id for candidate in finalists}
        discarded = _score_discarded(
            {
                Stage.TWC.value: [c for c in candidates if c.id not in kept_twc],
                Stage.MTM.value: [
                    m.candidate for m in waveform if m.candidate.id not in kept_mtm
                ],
            },
            ref_graph,
            model,
            config,
            output_dir,
        )

    result = PipelineResult(
        ranking=ranking,
        stage_sizes=sizes,
        timings=timer.to_dict(),
        output_dir=output_dir,
        discarded=discarded,
    )
    write_summary(run_summary(result, config), output_dir / SUMMARY_FILE)
    _logger.info(
        "Funnel %s; best %s (%.4f)",
        " -> ".join(str(n) for n in sizes.values()),
        result.best.id,
        result.best.score,
    )
    return result


def run_summary(result: PipelineResult, config: PipelineConfig) -> dict:
    summary = {
        "version": __version__,
        "seed": config.seed,
        "config_hash": config.config_hash(),
        "stage_sizes": result.stage_sizes,
        "timings": result.timings,
        "best": result.best.to_row(),
    }
    if result.discarded:
        summary["discarded"] = {
            name: histogram.to_dict(config.histogram_threshold)
            for name, histogram in result.discarded.items()
        }
    return summary
