import numpy as np
import pytest

from terranalog.core.raster import (
    PlantedDepression,
    PlantedValley,
    SynthSpec,
    synth_terrain,
)
from terranalog.core.raster.synth import random_valleys, valley_floor_cells
from terranalog.exception import ExtentError
from tests.fixture.synthetic_factory import VALLEY_SPEC


def test_flat_spec_is_base_elevation():
    grid = synth_terrain(SynthSpec(size=(16, 24), base_elevation=-4000.0))
    assert grid.shape == (16, 24)
    assert np.all(grid.elevations == -4000.0)


def test_valley_has_v_profile():
    grid = synth_terrain(VALLEY_SPEC)
    # half width is 600 m, or 20 cells of 30 m
    column = grid.elevations[:, 64]

    assert column[64] == pytest.approx(-300.0)
    assert column[74] == pytest.approx(-150.0)
    assert column[84] == pytest.approx(0.0)
    assert column[20] == 0.0
    assert np.argmin(column) == 64


def test_overlapping_carvings_keep_deepest():
    spec = SynthSpec(
        size=64,
        valleys=(
            PlantedValley((32.0, 5.0), (32.0, 58.0), depth=100.0, width=600.0),
            PlantedValley((5.0, 32.0), (58.0, 32.0), depth=250.0, width=600.0),
        ),
    )
    grid = synth_terrain(spec)
    assert grid.elevations[32, 32] == pytest.approx(-250.0)


def test_depression_profile():
    bowl = PlantedDepression((32.0, 32.0), radius=600.0, depth=80.0)
    spec = SynthSpec(size=64, depressions=(bowl,))
    grid = synth_terrain(spec)

    assert grid.elevations[32, 32] == pytest.approx(-80.0)
    # 10 cells out is half the 20-cell radius
    assert grid.elevations[32, 42] == pytest.approx(-80.0 * 0.75)
    assert grid.elevations[32, 60] == 0.0


def test_same_seed_same_terrain():
    spec = SynthSpec(size=65, roughness=25.0)
    a = synth_terrain(spec, seed=3)
    b = synth_terrain(spec, seed=3)
    c = synth_terrain(spec, seed=4)

    assert a == b
    assert a != c
    assert abs(a.elevations.mean()) < 1e-9


def test_jitter_moves_the_floor():
    straight = synth_terrain(VALLEY_SPEC)
    valley = PlantedValley((64.0, 10.0), (64.0, 117.0), 300.0, 1200.0, jitter=150.0)
    meandering = synth_terrain(SynthSpec(size=128, valleys=(valley,)), seed=1)

    assert meandering != straight
    assert meandering.elevations.min() == pytest.approx(-300.0, abs=30.0)


# test cases for out-of-extent features
def test_reject_valley_outside_extent():
    valley = PlantedValley((200.0, 10.0), (64.0, 117.0), depth=300.0, width=1200.0)
    with pytest.raises(ExtentError) as e:
        synth_terrain(SynthSpec(size=128, valleys=(valley,)))
    assert "Valley endpoint (200.0, 10.0) outside 128x128 extent." == str(e.value)


def test_reject_depression_outside_extent():
    bowl = PlantedDepression((10.0, -1.0), radius=300.0, depth=50.0)
    with pytest.raises(ExtentError):
        synth_terrain(SynthSpec(size=32, depressions=(bowl,)))


class TestSynthSpec:
    def test_square_size(self):
        assert SynthSpec(size=40).shape == (40, 40)

    def test_from_dict_reads_nested_features(self):
        spec = SynthSpec.from_dict(
            {
                "size": [41, 100],
                "roughness": 30.0,
                "valleys": [
                    {"start": [20, 2], "end": [20, 97], "depth": 300, "width": 1200}
                ],
            }
        )
        assert spec.shape == (41, 100)
        assert spec.valleys[0] == PlantedValley((20, 2), (20, 97), 300.0, 1200.0)

    def test_to_dict_feeds_from_dict(self):
        assert SynthSpec.from_dict(VALLEY_SPEC.to_dict()) == VALLEY_SPEC


def test_valley_floor_cells():
    cells = valley_floor_cells(VALLEY_SPEC)
    assert len(cells) == 108
    assert set(cells[:, 0]) == {64}


def test_random_valleys_stay_in_range(rng):
    valleys = random_valleys(20, (64, 80), rng, margin=4)

    assert len(valleys) == 20
    for valley in valleys:
        for r, c in (valley.start, valley.end):
            assert 4 <= r < 60 and 4 <= c < 76
        assert 150.0 <= valley.depth <= 600.0
        assert 600.0 <= valley.width <= 2400.0
