from __future__ import annotations

import os
from typing import Union

from terranalog.core.pipeline.histogram import SimilarityHistogram


def render_histogram_svg(
    histogram: SimilarityHistogram,
    path: Union[str, os.PathLike],
    title: str = "Similarity scores",
) -> None:
    """
    Draw ``histogram`` as a static SVG bar chart.

    Needs the ``plot`` extra; matplotlib is imported here so the rest of the
    package runs without it. The figure is built without pyplot, so the
    caller's backend and open figures are left alone.
    """
    try:
        from matplotlib.figure import Figure
    except ImportError as e:
        raise ImportError(
            "Rendering histograms needs matplotlib; install terranalog[plot]."
        ) from e

    edges = histogram.edges
    fig = Figure(figsize=(6, 4))
    ax = fig.subplots()
    ax.bar(
        edges[:-1],
        histogram.counts,
        width=edges[1:] - edges[:-1],
        align="edge",
        edgecolor="black",
    )
    ax.set_xlim(0.0, 1.0)
    ax.set_xlabel("Similarity score")
    ax.set_ylabel("Frequency")
    if histogram.defined:
        stats = f"mean {histogram.mean:.3f}, median {histogram.median:.3f}"
        title = f"{title} ({stats})"
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg")
