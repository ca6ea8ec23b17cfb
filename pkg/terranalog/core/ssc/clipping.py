from __future__ import annotations

import logging
from typing import List, Optional, Sequence

from terranalog.core.raster.dem_grid import BoundingBox, DemGrid
from terranalog.core.ssc.candidate import ValleyCandidate
from terranalog.core.ssc.skeleton import Skeleton, fit_skeleton_line
from terranalog.exception import StageInputError
from terranalog.util.dedup_utils import deduplicate_candidates

_logger = logging.getLogger(__name__)


def select_and_clip(
    tile: DemGrid,
    skeletons: Sequence[Skeleton],
    err: float = 2.0,
    s_l: float = 167.0,
    s_u: float = 1333.0,
    margin: int = 15,
    tile_id: str = "tile",
    dedup_iou: Optional[float] = None,
) -> List[ValleyCandidate]:
    """
    Keep the straight, valley-sized skeletons and clip their terrain.

    A skeleton is accepted when its line fit has ``mse <= err`` and
    ``s_l <= length <= s_u``. Its candidate raster is the tile cropped to the
    skeleton's bounding box grown by ``margin`` pixels.

    Parameters
    ----------
    tile : DemGrid
        The host tile.
    skeletons : sequence of Skeleton
        Thinned components of the tile.
    err : float
        Largest accepted mean squared perpendicular error, pixels².
    s_l, s_u : float
        Accepted fitted length range, pixels.
    margin : int
        Pixels added around each skeleton's bounding box.
    tile_id : str
        Identifier of the tile, used to build candidate ids.
    dedup_iou : float, optional
        When given, candidates overlapping a better one by more than this are
        dropped. Cross-tile duplicates are removed by the screening stage.

    Returns
    -------
    list of ValleyCandidate
        Accepted candidates in component order; may be empty.
    """
    if s_l > s_u:
        raise StageInputError(f"Length bounds are inverted: {s_l} > {s_u}.")
    candidates = []
    for skeleton in skeletons:
        if len(skeleton) < 2:
            continue
        fit = fit_skeleton_line(skeleton)
        if not (fit.mse <= err and s_l <= fit.length <= s_u):
            continue
        box = BoundingBox.around(skeleton.pixels).expand(margin, tile.rows, tile.cols)
        candidates.append(
            ValleyCandidate(
                id=f"{tile_id}-{skeleton.component_id:05d}",
                raster=tile.crop(box),
                fit=fit,
                source_tile=tile_id,
                box=box,
            )
        )
    kept = (
        candidates
        if dedup_iou is None
        else deduplicate_candidates(candidates, dedup_iou)
    )
    _logger.debug(
        "Tile %s: %d skeletons, %d accepted, %d after dedup",
        tile_id,
        len(skeletons),
        len(candidates),
        len(kept),
    )
    return kept
