from .config_error import ConfigError
from .graph_error import GraphFormatError
from .model_error import DatasetError, ModelError
from .raster_error import ExtentError, GridFormatError, MosaicError
from .stage_error import EmptyStageError, StageInputError
from .terranalog_error import TerranalogError

__all__ = [
    "ConfigError",
    "DatasetError",
    "EmptyStageError",
    "ExtentError",
    "GraphFormatError",
    "GridFormatError",
    "ModelError",
    "MosaicError",
    "StageInputError",
    "TerranalogError",
]
