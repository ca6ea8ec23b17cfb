"""
Command-line entry point.

Each funnel stage is its own subcommand so stages can be re-run on their own;
``pipeline`` chains them. Exit status is 0 on success, 2 for configuration
or usage errors, 3 when a stage produces no candidates and 1 for any other
input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import re
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from terranalog import __version__
from terranalog.api import load_grid, named_grids, save_grid, train_model
from terranalog.config import PipelineConfig, load_config
from terranalog.core.enum import Stage
from terranalog.core.graph import build_graph, read_graph, write_graph
from terranalog.core.msgnet import (
    export_activations,
    kfold_evaluate,
    load_checkpoint,
    save_checkpoint,
    train,
    write_activations,
    write_history,
)
from terranalog.core.mtm import MTM_COLUMNS, mtm_filter
from terranalog.core.pipeline import (
    ABLATION_COLUMNS,
    ablation_run,
    load_candidates,
    load_graph_directory,
    load_pair_dataset,
    pairwise_distances,
    run_pipeline,
    save_candidates,
    similarity_histogram,
    write_distance_matrix,
    write_histogram,
    write_manifest,
)
from terranalog.core.pipeline.dataset import GRAPH_SUFFIX
from terranalog.core.pipeline.funnel import (
    build_candidate_graphs,
    reference_slices,
    reference_texture,
)
from terranalog.core.pipeline.manifest import (
    SCORE_COLUMNS,
    select_candidates,
    write_summary,
)
from terranalog.core.pipeline.retrieval import rank_candidates
from terranalog.core.raster import (
    DemGrid,
    SynthSpec,
    build_tiles,
    synth_terrain,
    write_binary_grid,
    write_binary_matrix,
)
from terranalog.core.raster.reference import (
    extract_reference_trench,
    reference_candidate,
)
from terranalog.core.ssc import screen_tiles
from terranalog.core.twc import TWC_COLUMNS, twc_filter
from terranalog.exception import ConfigError, EmptyStageError, TerranalogError

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_EMPTY_STAGE = 3

_CATALOG_KEY = re.compile(r"r(-?\d+)c(-?\d+)$")


def _reference(args: argparse.Namespace):
    grid = load_grid(args.reference)
    if getattr(args, "azimuth", None) is None:
        return reference_candidate(grid)
    return extract_reference_trench(grid, args.azimuth).as_candidate()


def _candidates(args: argparse.Namespace):
    candidates = load_candidates(args.candidates)
    if getattr(args, "manifest", None):
        candidates = select_candidates(candidates, args.manifest)
    return candidates


def _require_output(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args: argparse.Namespace, config: PipelineConfig) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grids = named_grids(args.grids)
    if not args.tiles:
        for name, grid in grids:
            write_binary_grid(grid, out / f"{name}.tgrd")
        _logger.info("Converted %d grids into %s", len(grids), out)
        return EXIT_OK
    catalog: Dict[Tuple[int, int], DemGrid] = {}
    for name, grid in grids:
        match = _CATALOG_KEY.search(name)
        if match is None:
            raise ConfigError(f"Grid {name} is not named like r<row>c<col>.")
        catalog[(int(match.group(1)), int(match.group(2)))] = grid
    tiles = build_tiles(catalog)
    for tile_id, tile in tiles:
        write_binary_grid(tile, out / f"{tile_id}.tgrd")
    _logger.info("Built %d tiles into %s", len(tiles), out)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace, config: PipelineConfig) -> int:
    data = json.loads(Path(args.spec).read_text(encoding="utf-8")) if args.spec else {}
    try:
        spec = SynthSpec.from_dict(data)
    except (KeyError, TypeError) as e:
        raise ConfigError(f"Invalid terrain spec: {e}") from e
    seed = config.seed if args.seed is None else args.seed
    save_grid(synth_terrain(spec, seed=seed), _require_output(args))
    return EXIT_OK


def cmd_ssc(args: argparse.Namespace, config: PipelineConfig) -> int:
    candidates = screen_tiles(named_grids(args.tiles), config.ssc, config.workers)
    if not candidates:
        raise EmptyStageError(Stage.SSC, "No straight valley passed screening.")
    save_candidates(candidates, args.out)
    print(f"{len(candidates)} candidates written to {args.out}")
    return EXIT_OK


def cmd_twc(args: argparse.Namespace, config: PipelineConfig) -> int:
    ref_slices = reference_slices(_reference(args), config)
    kept = twc_filter(
        _candidates(args),
        ref_slices,
        keep=args.keep or config.twc_keep,
        spacing=config.twc.spacing,
        workers=config.workers,
    )
    kept = [match for match in kept if math.isfinite(match.cost)]
    if not kept:
        raise EmptyStageError(Stage.TWC, "No candidate could be sliced.")
    rows = (match.to_row() for match in kept)
    count = write_manifest(rows, TWC_COLUMNS, _require_output(args))
    print(f"{count} candidates kept by waveform comparison")
    return EXIT_OK


def cmd_mtm(args: argparse.Namespace, config: PipelineConfig) -> int:
    texture = reference_texture(reference_slices(_reference(args), config), config)
    if args.components:
        write_binary_matrix(texture.eigenshape.components, args.components)
    kept = mtm_filter(
        _candidates(args),
        texture,
        keep=args.keep or config.mtm_keep,
        spacing=config.twc.spacing,
        workers=config.workers,
    )
    if not kept:
        raise EmptyStageError(Stage.MTM)
    rows = (match.to_row() for match in kept)
    count = write_manifest(rows, MTM_COLUMNS, _require_output(args))
    print(f"{count} candidates kept by texture matching")
    return EXIT_OK


def cmd_graph(args: argparse.Namespace, config: PipelineConfig) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    built = []
    if args.candidates:
        candidates = _candidates(args)
        built.extend(build_candidate_graphs(candidates, config.graph, config.workers))
    for name, grid in named_grids(args.grids or ()):
        built.append((name, build_graph(grid, config.graph)))
    for name, graph in built:
        write_graph(graph, out / f"{name}{GRAPH_SUFFIX}")
    if args.reference:
        ref_graph = build_graph(_reference(args).raster, config.reference_graph)
        write_graph(ref_graph, out / f"reference{GRAPH_SUFFIX}")
    print(f"{len(built)} graphs written to {out}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace, config: PipelineConfig) -> int:
    graphs = load_graph_directory(args.graphs)
    pairs = load_pair_dataset(args.pairs, graphs)
    result = train(pairs, graphs, config.train, config.model)
    save_checkpoint(result.model, args.checkpoint)
    if args.history:
        write_history(result.history, args.history)
    print(
        f"Trained {result.epochs_run} epochs, best epoch {result.best_epoch}; "
        f"checkpoint written to {args.checkpoint}"
    )
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, config: PipelineConfig) -> int:
    graphs = load_graph_directory(args.graphs)
    pairs = load_pair_dataset(args.pairs, graphs)
    report = kfold_evaluate(pairs, graphs, config.train, config.model, folds=args.folds)
    for name, value in report.formatted().items():
        print(f"{name:>9}: {value}")
    if args.report:
        write_summary(report.to_dict(), args.report)
    return EXIT_OK


def cmd_ablate(args: argparse.Namespace, config: PipelineConfig) -> int:
    graphs = load_graph_directory(args.graphs)
    pairs = load_pair_dataset(args.pairs, graphs)
    rows = ablation_run(
        pairs, graphs, args.drop or (), config.train, config.model, folds=args.folds
    )
    table = [row.to_row() for row in rows]
    if args.out:
        write_manifest(table, ABLATION_COLUMNS, _require_output(args))
    for row in table:
        print(" | ".join(str(row[name]) for name in ABLATION_COLUMNS))
    return EXIT_OK


def cmd_retrieve(args: argparse.Namespace, config: PipelineConfig) -> int:
    checkpoint = args.checkpoint or config.checkpoint
    if not checkpoint:
        raise ConfigError("retrieve needs --checkpoint or checkpoint=<file>.")
    model = load_checkpoint(checkpoint)
    graphs = load_graph_directory(args.graphs)
    candidates = sorted(
        (name, graph) for name, graph in graphs.items() if name != "reference"
    )
    if not candidates:
        raise EmptyStageError(Stage.MSGNET, f"No graphs in {args.graphs}.")
    ref_graph = read_graph(args.reference_graph)
    ranking = rank_candidates(candidates, ref_graph, model, config.workers)
    if args.out:
        rows = (entry.to_row() for entry in ranking)
        write_manifest(rows, SCORE_COLUMNS, _require_output(args))
    if args.distances:
        ids, distances = pairwise_distances(candidates, model, config.workers)
        write_distance_matrix(ids, distances, args.distances)
    if args.activations:
        best = graphs[ranking[0].id]
        write_activations(best, export_activations(best, model.gcn), args.activations)
    print(f"Best analog: {ranking[0].id} (score {ranking[0].score:.4f})")
    return EXIT_OK


def cmd_pipeline(args: argparse.Namespace, config: PipelineConfig) -> int:
    model = None
    if args.train_pairs:
        model = train_model(args.train_pairs, args.train_graphs, config)
    elif not config.checkpoint:
        raise ConfigError("pipeline needs checkpoint=<file> or --train-pairs.")
    result = run_pipeline(named_grids(args.tiles), _reference(args), config, model)
    sizes = " -> ".join(f"{k} {v}" for k, v in result.stage_sizes.items())
    print(f"Funnel: {sizes}")
    print(f"Best analog: {result.best.id} (score {result.best.score:.4f})")
    return EXIT_OK


def _read_scores(path: str, column: str) -> List[float]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if column not in (reader.fieldnames or []):
            raise ConfigError(f"{path} has no column {column!r}.")
        return [float(record[column]) for record in reader]


def cmd_hist(args: argparse.Namespace, config: PipelineConfig) -> int:
    width = args.bin_width or config.histogram_bin_width
    threshold = config.histogram_threshold if args.threshold is None else args.threshold
    histogram = similarity_histogram(_read_scores(args.scores, args.column), width)
    write_histogram(histogram, _require_output(args))
    if args.svg:
        from terranalog.util.plotting import render_histogram_svg

        render_histogram_svg(histogram, args.svg)
    print(json.dumps(histogram.to_dict(threshold), sort_keys=True))
    return EXIT_OK


def _add_reference(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "--reference", required=required, help="Reference trench grid (.asc or .tgrd)"
    )
    parser.add_argument(
        "--azimuth",
        type=float,
        default=None,
        help="Extract the trench along this bearing instead of using the grid as is",
    )


def _add_candidates(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "--candidates", required=required, help="Candidate directory written by ssc"
    )
    parser.add_argument(
        "--manifest", default=None, help="Only the candidates listed in this stage CSV"
    )


def _add_dataset(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--pairs", required=True, help="CSV with graph_a, graph_b, label"
    )
    parser.add_argument("--graphs", required=True, help="Directory of <id>.graph files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="terranalog", description="Coarse-to-fine terrain analog retrieval."
    )
    parser.add_argument("--version", action="version", version=__version__)
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v", "--verbose", action="store_true", help="Log debug output"
    )
    verbosity.add_argument(
        "-q", "--quiet", action="store_true", help="Log warnings only"
    )
    parser.add_argument("--config", default=None, help="JSON configuration file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a setting, e.g. --set ssc.blk=21 (repeatable)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="Convert ASCII grids, optionally into 2x2 tiles")
    p.add_argument("grids", nargs="+")
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument(
        "--tiles",
        action="store_true",
        help="Mosaic grids named r<row>c<col> into tiles",
    )
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="Generate a synthetic terrain")
    p.add_argument("--spec", default=None, help="JSON terrain description")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="Output grid (.asc or .tgrd)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ssc", help="Screen tiles for straight valley candidates")
    p.add_argument("tiles", nargs="+")
    p.add_argument("--out", required=True, help="Candidate directory")
    p.set_defaults(func=cmd_ssc)

    p = sub.add_parser("twc", help="Filter candidates by cross-section waveform")
    _add_candidates(p)
    _add_reference(p)
    p.add_argument("--keep", type=int, default=None)
    p.add_argument("--out", required=True, help="Manifest CSV")
    p.set_defaults(func=cmd_twc)

    p = sub.add_parser("mtm", help="Filter candidates by cross-section texture")
    _add_candidates(p)
    _add_reference(p)
    p.add_argument("--keep", type=int, default=None)
    p.add_argument("--components", default=None, help="Write reference components")
    p.add_argument("--out", required=True, help="Manifest CSV")
    p.set_defaults(func=cmd_mtm)

    p = sub.add_parser("graph", help="Build terrain graphs")
    _add_candidates(p, required=False)
    _add_reference(p, required=False)
    p.add_argument("--grids", nargs="*", default=None, help="Grids to convert as well")
    p.add_argument("--out", required=True, help="Graph directory")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("train", help="Train the Siamese graph model")
    _add_dataset(p)
    p.add_argument("--checkpoint", required=True, help="Output checkpoint")
    p.add_argument("--history", default=None, help="Per-epoch CSV")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="Stratified k-fold cross-validation")
    _add_dataset(p)
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--report", default=None, help="JSON report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="Cross-validate with feature channels zeroed")
    _add_dataset(p)
    p.add_argument(
        "--drop",
        action="append",
        default=[],
        help="Feature, or '+'-joined group, to zero (repeatable)",
    )
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--out", default=None, help="Ablation table CSV")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("retrieve", help="Rank graphs against a reference graph")
    p.add_argument("--graphs", required=True, help="Directory of candidate graphs")
    p.add_argument("--reference-graph", required=True, help="Reference graph file")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--out", default=None, help="Ranking CSV")
    p.add_argument("--distances", default=None, help="Pairwise distance CSV")
    p.add_argument("--activations", default=None, help="Activation CSV of the best")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("pipeline", help="Run the whole funnel")
    p.add_argument("tiles", nargs="+")
    _add_reference(p)
    p.add_argument("--train-pairs", default=None, help="Train first on this dataset")
    p.add_argument("--train-graphs", default=None, help="Graphs for --train-pairs")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("hist", help="Histogram of similarity scores")
    p.add_argument("--scores", required=True, help="CSV holding the scores")
    p.add_argument("--column", default="score")
    p.add_argument("--bin-width", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--out", required=True, help="Histogram CSV")
    p.add_argument("--svg", default=None, help="Also render an SVG chart")
    p.set_defaults(func=cmd_hist)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        config = load_config(args.config, args.overrides)
        if args.command == "pipeline" and args.train_pairs and not args.train_graphs:
            raise ConfigError("--train-pairs needs --train-graphs.")
        return args.func(args, config)
    except ConfigError as e:
        _logger.error("%s", e)
        return EXIT_CONFIG
    except EmptyStageError as e:
        _logger.error("%s", e)
        return EXIT_EMPTY_STAGE
    except (TerranalogError, OSError) as e:
        _logger.error("%s", e)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
