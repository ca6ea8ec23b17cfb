from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

from terranalog.config import PipelineConfig, load_config
from terranalog.core.msgnet import SiameseModel, load_checkpoint, train
from terranalog.core.pipeline import (
    PipelineResult,
    load_graph_directory,
    load_pair_dataset,
    run_pipeline,
)
from terranalog.core.raster import (
    DemGrid,
    load_ascii_grid,
    read_binary_grid,
    write_ascii_grid,
    write_binary_grid,
)

PathLike = Union[str, os.PathLike]

BINARY_GRID_SUFFIX = ".tgrd"


def load_grid(path: PathLike) -> DemGrid:
    """
    Read a DEM from ``path``.

    Files ending in ``.tgrd`` are read as binary grids; anything else is
    parsed as an ESRI ASCII grid.

    Parameters
    ----------
    path : str or os.PathLike
        The grid file.

    Returns
    -------
    DemGrid
        The elevation grid with its nodata mask.

    Raises
    ------
    GridFormatError
        If the file is malformed.
    """
    if Path(path).suffix.lower() == BINARY_GRID_SUFFIX:
        return read_binary_grid(path)
    return load_ascii_grid(path)


def save_grid(grid: DemGrid, path: PathLike) -> None:
    """Write ``grid`` to ``path``, choosing the format from the suffix."""
    if Path(path).suffix.lower() == BINARY_GRID_SUFFIX:
        write_binary_grid(grid, path)
    else:
        write_ascii_grid(grid, path)


def named_grids(paths: Iterable[PathLike]) -> Sequence[Tuple[str, DemGrid]]:
    """Load grids keyed by file stem, the id every stage reports them under."""
    return [(Path(path).stem, load_grid(path)) for path in paths]


def train_model(
    pairs_path: PathLike,
    graph_dir: PathLike,
    config: Optional[PipelineConfig] = None,
) -> SiameseModel:
    """
    Train a siamese model from a labelled pair file.

    Parameters
    ----------
    pairs_path : str or os.PathLike
        CSV with ``graph_a``, ``graph_b`` and ``label`` columns.
    graph_dir : str or os.PathLike
        Directory of ``.graph`` files named after the ids in the pair file.
    config : PipelineConfig, optional
        Model and training settings; the defaults when omitted.

    Returns
    -------
    SiameseModel
        The weights from the epoch with the best validation loss.
    """
    config = config or PipelineConfig()
    graphs = load_graph_directory(graph_dir)
    pairs = load_pair_dataset(pairs_path, graphs)
    return train(pairs, graphs, config.train, config.model).model


def find_analogs(
    tiles: Iterable[PathLike],
    reference: PathLike,
    config: Union[PipelineConfig, PathLike, None] = None,
    model: Union[SiameseModel, PathLike, None] = None,
) -> PipelineResult:
    """
    Run the whole funnel over DEM files and rank the surviving valleys.

    Parameters
    ----------
    tiles : iterable of str or os.PathLike
        Tile grids to screen. Their file stems become tile ids.
    reference : str or os.PathLike
        Grid holding the reference trench, with its axis along the columns.
    config : PipelineConfig or path, optional
        A configuration object or a JSON configuration file.
    model : SiameseModel or path, optional
        A model or a checkpoint file. Falls back to ``config.checkpoint``.

    Returns
    -------
    PipelineResult
        The ranking, stage sizes and timings. Stage manifests are written to
        ``config.output_dir``.

    Examples
    --------
    >>> result = find_analogs(["r0c0.asc"], "trench.asc")  # doctest: +SKIP
    >>> result.best.id  # doctest: +SKIP
    'r0c0-00003'
    """
    if not isinstance(config, PipelineConfig):
        config = load_config(config)
    if model is not None and not isinstance(model, SiameseModel):
        model = load_checkpoint(model)
    return run_pipeline(named_grids(tiles), load_grid(reference), config, model)
