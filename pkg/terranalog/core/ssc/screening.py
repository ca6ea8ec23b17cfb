from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

from terranalog.config import SscConfig
from terranalog.core.enum import Stage
from terranalog.core.raster.dem_grid import DemGrid
from terranalog.core.ssc.candidate import ValleyCandidate
from terranalog.core.ssc.clipping import select_and_clip
from terranalog.core.ssc.ledb import ledb_binarize
from terranalog.core.ssc.skeleton import connected_components
from terranalog.core.ssc.thinning import zhang_suen_thin
from terranalog.util.dedup_utils import deduplicate_candidates
from terranalog.util.timing import timed_stage

_logger = logging.getLogger(__name__)


def screen_tile(
    tile: DemGrid, tile_id: str, config: Optional[SscConfig] = None
) -> List[ValleyCandidate]:
    """Run binarization, thinning, component split and line acceptance on one tile."""
    config = config or SscConfig()
    mask = ledb_binarize(tile, blk=config.blk, c=config.c)
    skeleton = zhang_suen_thin(mask)
    components = connected_components(skeleton)
    return select_and_clip(
        tile,
        components,
        err=config.err,
        s_l=config.s_l,
        s_u=config.s_u,
        margin=config.margin,
        tile_id=tile_id,
    )


@timed_stage(Stage.SSC)
def screen_tiles(
    tiles: Sequence[Tuple[str, DemGrid]],
    config: Optional[SscConfig] = None,
    workers: int = 1,
) -> List[ValleyCandidate]:
    """
    Screen every tile and merge the candidates.

    Tiles are processed independently, possibly in parallel, but results are
    concatenated in tile order so the output does not depend on ``workers``.
    Overlapping mosaics see the same valley more than once; duplicates whose
    footprints overlap by more than ``config.dedup_iou`` are dropped, keeping
    the straighter fit.

    Parameters
    ----------
    tiles : sequence of (str, DemGrid)
        Tile ids with their grids.
    config : SscConfig, optional
        Screening parameters.
    workers : int
        Thread count.

    Returns
    -------
    list of ValleyCandidate
        May be empty; the caller decides whether that is fatal.
    """
    config = config or SscConfig()
    if workers > 1 and len(tiles) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_tile = list(
                pool.map(lambda item: screen_tile(item[1], item[0], config), tiles)
            )
    else:
        per_tile = [screen_tile(grid, tile_id, config) for tile_id, grid in tiles]

    merged = [candidate for found in per_tile for candidate in found]
    kept = deduplicate_candidates(merged, config.dedup_iou)
    _logger.info(
        "Screened %d tiles: %d candidates, %d after removing duplicates",
        len(tiles),
        len(merged),
        len(kept),
    )
    return kept
