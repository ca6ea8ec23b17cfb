import json

import numpy as np
import pytest

from terranalog.core.pipeline import load_candidates, save_candidates, write_manifest
from terranalog.core.pipeline.manifest import (
    SSC_COLUMNS,
    select_candidates,
    write_candidates,
    write_summary,
)
from terranalog.core.ssc import screen_tile
from terranalog.exception import StageInputError
from tests.fixture.synthetic_factory import SMALL_TILE_SSC
from tests.fixture.terrain_factory import Surface, TerrainSource


@pytest.fixture
def candidates(terrain_fixture):
    grid = terrain_fixture(TerrainSource.SYNTHETIC, Surface.VALLEYS)
    return screen_tile(grid, "t0", SMALL_TILE_SSC)


def test_write_manifest(tmp_path):
    path = tmp_path / "rows.csv"
    rows = [
        {"id": "a", "score": 0.1, "rank": 1},
        {"id": "b", "score": 1 / 3, "rank": 2},
    ]
    count = write_manifest(rows, ("id", "score", "rank"), path)

    assert count == 2
    assert path.read_text(encoding="utf-8") == (
        "id,score,rank\na,0.1,1\nb,0.3333333333333333,2\n"
    )


def test_write_candidates(candidates, tmp_path):
    path = tmp_path / "ssc.csv"
    assert write_candidates(candidates, path) == len(candidates)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(SSC_COLUMNS)
    assert lines[1].startswith(f"{candidates[0].id},t0,")


def test_save_then_load_candidates(candidates, tmp_path):
    save_candidates(candidates, tmp_path / "store")
    loaded = load_candidates(tmp_path / "store")

    assert [c.id for c in loaded] == [c.id for c in candidates]
    for before, after in zip(candidates, loaded):
        assert after.fit == before.fit
        assert after.box == before.box
        assert after.source_tile == "t0"
        assert after.raster.cell_size == before.raster.cell_size
        # rasters are stored as 32-bit floats
        np.testing.assert_allclose(
            after.raster.elevations, before.raster.elevations, rtol=1e-6, atol=1e-4
        )


def test_load_without_manifest(tmp_path):
    with pytest.raises(StageInputError) as e:
        load_candidates(tmp_path)
    assert f"No candidate manifest at {tmp_path / 'candidates.csv'}." == str(e.value)


def test_load_with_missing_raster(candidates, tmp_path):
    store = save_candidates(candidates, tmp_path / "store")
    raster = store / "rasters" / f"{candidates[0].id}.tgrd"
    raster.unlink()
    with pytest.raises(StageInputError) as e:
        load_candidates(store)
    assert f"Candidate raster missing: {raster}." == str(e.value)


class TestSelectCandidates:
    def test_manifest_order(self, candidates, tmp_path):
        path = tmp_path / "twc.csv"
        chosen = [candidates[2], candidates[0]]
        write_candidates(chosen, path)
        assert [c.id for c in select_candidates(candidates, path)] == [
            c.id for c in chosen
        ]

    def test_reject_unknown_id(self, candidates, tmp_path):
        path = tmp_path / "twc.csv"
        path.write_text("id,cost\nzz,1.0\n", encoding="utf-8")
        with pytest.raises(StageInputError) as e:
            select_candidates(candidates, path)
        assert f"{path} lists 1 unknown candidates, first zz." == str(e.value)


def test_write_summary(tmp_path):
    path = tmp_path / "summary.json"
    write_summary({"b": 1, "a": {"y": 2.5, "x": None}}, path)

    text = path.read_text(encoding="utf-8")
    assert json.loads(text) == {"a": {"x": None, "y": 2.5}, "b": 1}
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("}\n")
