from __future__ import annotations

import numpy as np
import pytest

from terranalog.util.timing import StageTimer
from tests.fixture.analytic_factory import AnalyticFactory
from tests.fixture.synthetic_factory import SyntheticFactory
from tests.fixture.terrain_factory import Surface, TerrainSource


# setup and teardown
@pytest.fixture
def terrain_fixture():
    factories = {
        TerrainSource.ANALYTIC: AnalyticFactory(),
        TerrainSource.SYNTHETIC: SyntheticFactory(),
    }

    def create_grid(source: TerrainSource, surface: Surface):
        if source not in factories:
            raise ValueError(f"Unsupported source: {source}")
        return factories[source].create_grid(surface)

    return create_grid


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def stage_timer():
    timer = StageTimer()
    with timer.activate():
        yield timer
