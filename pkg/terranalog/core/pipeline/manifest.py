from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Iterable, List, Mapping, Sequence, Union

from terranalog.core.raster.binary_format import read_binary_grid, write_binary_grid
from terranalog.core.raster.dem_grid import BoundingBox
from terranalog.core.ssc.candidate import LineFit, ValleyCandidate
from terranalog.exception import StageInputError

PathLike = Union[str, os.PathLike]

SSC_COLUMNS = (
    "id",
    "source_tile",
    "row_min",
    "row_max",
    "col_min",
    "col_max",
    "length",
    "mse",
    "slope",
)
SCORE_COLUMNS = ("id", "score", "rank")


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_manifest(
    rows: Iterable[Mapping[str, object]], columns: Sequence[str], path: PathLike
) -> int:
    """
    Write one CSV row per mapping, in ``columns`` order.

    Floats are written with ``repr`` so identical runs produce identical
    bytes. Returns the number of data rows.
    """
    count = 0
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[name]) for name in columns])
            count += 1
    return count


def candidate_row(candidate: ValleyCandidate) -> dict:
    return {
        "id": candidate.id,
        "source_tile": candidate.source_tile,
        "row_min": candidate.box.row_min,
        "row_max": candidate.box.row_max,
        "col_min": candidate.box.col_min,
        "col_max": candidate.box.col_max,
        "length": candidate.fit.length,
        "mse": candidate.fit.mse,
        "slope": candidate.fit.slope,
    }


def write_candidates(candidates: Sequence[ValleyCandidate], path: PathLike) -> int:
    return write_manifest((candidate_row(c) for c in candidates), SSC_COLUMNS, path)


def write_summary(summary: Mapping[str, object], path: PathLike) -> None:
    Path(path).write_text(
        json.dumps(summary, indent=2, sort_keys=True, allow_nan=True) + "\n",
        encoding="utf-8",
    )


STORE_MANIFEST = "candidates.csv"
RASTER_DIR = "rasters"
RASTER_SUFFIX = ".tgrd"
_FIT_COLUMNS = (
    "slope",
    "intercept",
    "length",
    "mse",
    "centroid_row",
    "centroid_col",
    "dir_row",
    "dir_col",
    "start_row",
    "start_col",
    "end_row",
    "end_col",
)
STORE_COLUMNS = SSC_COLUMNS[:6] + _FIT_COLUMNS


def save_candidates(candidates: Sequence[ValleyCandidate], directory: PathLike) -> Path:
    """
    Persist candidates so a later stage can be re-run on its own.

    The directory receives ``candidates.csv`` with each box and line fit, and
    one binary grid per candidate under ``rasters/``. Rasters are stored as
    32-bit floats.
    """
    root = Path(directory)
    (root / RASTER_DIR).mkdir(parents=True, exist_ok=True)
    rows = []
    for candidate in candidates:
        write_binary_grid(
            candidate.raster, root / RASTER_DIR / f"{candidate.id}{RASTER_SUFFIX}"
        )
        rows.append(
            {
                "id": candidate.id,
                "source_tile": candidate.source_tile,
                **candidate.box.to_dict(),
                **candidate.fit.to_dict(),
            }
        )
    write_manifest(rows, STORE_COLUMNS, root / STORE_MANIFEST)
    return root


def load_candidates(directory: PathLike) -> List[ValleyCandidate]:
    """
    Read candidates written by :func:`save_candidates`, in manifest order.

    Raises
    ------
    StageInputError
        If the manifest is missing or names a raster that does not exist.
    """
    root = Path(directory)
    manifest = root / STORE_MANIFEST
    if not manifest.is_file():
        raise StageInputError(f"No candidate manifest at {manifest}.")
    candidates = []
    with manifest.open(newline="", encoding="utf-8") as handle:
        for record in csv.DictReader(handle):
            raster_path = root / RASTER_DIR / f"{record['id']}{RASTER_SUFFIX}"
            if not raster_path.is_file():
                raise StageInputError(f"Candidate raster missing: {raster_path}.")
            box = BoundingBox(
                int(record["row_min"]),
                int(record["row_max"]),
                int(record["col_min"]),
                int(record["col_max"]),
            )
            candidates.append(
                ValleyCandidate(
                    id=record["id"],
                    raster=read_binary_grid(raster_path),
                    fit=LineFit.from_dict(record),
                    source_tile=record["source_tile"],
                    box=box,
                )
            )
    return candidates


def select_candidates(
    candidates: Sequence[ValleyCandidate], manifest: PathLike
) -> List[ValleyCandidate]:
    """The candidates listed in a stage manifest, in manifest order."""
    by_id = {candidate.id: candidate for candidate in candidates}
    with Path(manifest).open(newline="", encoding="utf-8") as handle:
        ids = [record["id"] for record in csv.DictReader(handle)]
    unknown = [key for key in ids if key not in by_id]
    if unknown:
        raise StageInputError(
            f"{manifest} lists {len(unknown)} unknown candidates, first {unknown[0]}."
        )
    return [by_id[key] for key in ids]
