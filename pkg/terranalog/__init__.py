from __future__ import annotations

__version__ = "0.4.0"

from .api import (  # noqa: E402
    find_analogs,
    load_grid,
    named_grids,
    save_grid,
    train_model,
)
from .config import PipelineConfig, load_config  # noqa: E402
from .core.enum import GeomorphFeature, Mode, Stage  # noqa: E402
from .core.msgnet import SiameseModel, load_checkpoint, save_checkpoint  # noqa: E402
from .core.pipeline import (  # noqa: E402
    PipelineResult,
    retrieve,
    run_pipeline,
    similarity_histogram,
)

__all__ = [
    "GeomorphFeature",
    "Mode",
    "Stage",
    "PipelineConfig",
    "PipelineResult",
    "SiameseModel",
    "find_analogs",
    "load_checkpoint",
    "load_config",
    "load_grid",
    "named_grids",
    "retrieve",
    "run_pipeline",
    "save_checkpoint",
    "save_grid",
    "similarity_histogram",
    "train_model",
]
