from __future__ import annotations
from abc import ABC, abstractmethod
from enum import Enum

from terranalog.core.raster import DemGrid


class TerrainSource(str, Enum):
    ANALYTIC = "analytic"
    SYNTHETIC = "synthetic"


class Surface(str, Enum):
    FLAT = "flat"
    PLANE = "plane"
    HEMISPHERE = "hemisphere"
    BOWL = "bowl"
    VALLEY = "valley"
    VALLEYS = "valleys"
    ROUGH_VALLEY = "rough_valley"


class TerrainFactory(ABC):
    @abstractmethod
    def create_grid(self, surface: Surface) -> DemGrid:
        raise NotImplementedError()
