from __future__ import annotations

import csv
import logging
import os
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

from terranalog.core.graph.graph_io import read_graph
from terranalog.core.graph.terrain_graph import TerrainGraph
from terranalog.core.msgnet.pairs import LabeledPair
from terranalog.exception import DatasetError

_logger = logging.getLogger(__name__)

PAIR_COLUMNS = ("graph_a", "graph_b", "label")
GRAPH_SUFFIX = ".graph"

PathLike = Union[str, os.PathLike]


def balance_summary(pairs: Sequence[LabeledPair]) -> str:
    """
    Examples
    --------
    >>> balance_summary([LabeledPair("a", "b", 1), LabeledPair("a", "c", 0)])
    '1 positive, 1 negative'
    """
    positives = sum(pair.label for pair in pairs)
    return f"{positives} positive, {len(pairs) - positives} negative"


def _parse_label(row: int, raw: Optional[str]) -> int:
    text = (raw or "").strip()
    if text not in ("0", "1"):
        raise DatasetError(row, f"label must be 0 or 1, got {text!r}")
    return int(text)


def load_pair_dataset(
    path: PathLike, graphs: Optional[Mapping[str, TerrainGraph]] = None
) -> List[LabeledPair]:
    """
    Read a labelled pair file with the columns ``graph_a, graph_b, label``.

    Parameters
    ----------
    path : str or PathLike
        CSV file with a header row.
    graphs : mapping of str to TerrainGraph, optional
        When given, every graph id must be a key.

    Raises
    ------
    DatasetError
        Naming the one-based data row for a non-binary label, an empty id or
        a graph id missing from ``graphs``.
    """
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = [name.strip() for name in (reader.fieldnames or [])]
        missing = [name for name in PAIR_COLUMNS if name not in header]
        if missing:
            raise DatasetError(None, f"{path} lacks columns {', '.join(missing)}")
        reader.fieldnames = header
        pairs = []
        for row, record in enumerate(reader, start=1):
            label = _parse_label(row, record.get("label"))
            first = (record.get("graph_a") or "").strip()
            second = (record.get("graph_b") or "").strip()
            if not first or not second:
                raise DatasetError(row, "graph ids must not be empty")
            if graphs is not None:
                for key in (first, second):
                    if key not in graphs:
                        raise DatasetError(row, f"unknown graph id {key!r}")
            pairs.append(LabeledPair(first, second, label))
    _logger.info(
        "Loaded %d pairs from %s: %s", len(pairs), path, balance_summary(pairs)
    )
    return pairs


def write_pair_dataset(pairs: Sequence[LabeledPair], path: PathLike) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(PAIR_COLUMNS)
        for pair in pairs:
            writer.writerow([pair.graph_a, pair.graph_b, pair.label])


def load_graph_directory(directory: PathLike) -> Dict[str, TerrainGraph]:
    """Read every ``<id>.graph`` file in ``directory``, keyed by id."""
    root = Path(directory)
    if not root.is_dir():
        raise DatasetError(None, f"graph directory not found: {directory}")
    files = sorted(root.glob(f"*{GRAPH_SUFFIX}"))
    graphs = {path.stem: read_graph(path) for path in files}
    _logger.info("Loaded %d graphs from %s", len(graphs), directory)
    return graphs
