import numpy as np
import pytest

from terranalog.api import find_analogs, load_grid, named_grids, save_grid, train_model
from terranalog.config import (
    GraphConfig,
    ModelConfig,
    PipelineConfig,
    TrainConfig,
)
from terranalog.core.graph import write_graph
from terranalog.core.msgnet import SiameseModel, save_checkpoint
from terranalog.core.pipeline import write_pair_dataset
from terranalog.core.raster import PlantedValley, SynthSpec, synth_terrain
from terranalog.exception import GridFormatError
from tests.fixture.graph_factory import separable_benchmark
from tests.fixture.synthetic_factory import SMALL_TILE_SSC
from tests.fixture.terrain_factory import Surface, TerrainSource

MODEL_CONFIG = ModelConfig(hidden=8, layers=2, pool_ratio=0.5, mlp_hidden=(8, 4))


class TestGridFiles:
    @pytest.mark.parametrize("suffix", [".asc", ".tgrd", ".TGRD"])
    def test_save_then_load(self, terrain_fixture, tmp_path, suffix):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.PLANE)
        path = tmp_path / f"plane{suffix}"
        save_grid(grid, path)
        loaded = load_grid(path)

        assert loaded.shape == grid.shape
        assert loaded.cell_size == grid.cell_size
        np.testing.assert_allclose(loaded.elevations, grid.elevations, rtol=1e-6)

    def test_ascii_is_the_fallback(self, tmp_path):
        path = tmp_path / "dem.txt"
        path.write_text("not a grid\n", encoding="utf-8")
        with pytest.raises(GridFormatError):
            load_grid(path)

    def test_named_grids_use_stems(self, terrain_fixture, tmp_path):
        grid = terrain_fixture(TerrainSource.ANALYTIC, Surface.FLAT)
        save_grid(grid, tmp_path / "r0c1.tgrd")
        save_grid(grid, tmp_path / "r0c0.asc")

        grids = named_grids([tmp_path / "r0c1.tgrd", tmp_path / "r0c0.asc"])
        assert [name for name, _ in grids] == ["r0c1", "r0c0"]


def test_find_analogs(terrain_fixture, tmp_path):
    tile = tmp_path / "t0.tgrd"
    save_grid(terrain_fixture(TerrainSource.SYNTHETIC, Surface.VALLEYS), tile)
    reference = tmp_path / "trench.tgrd"
    valley = PlantedValley((20.0, 2.0), (20.0, 97.0), depth=300.0, width=1200.0)
    save_grid(synth_terrain(SynthSpec(size=(41, 100), valleys=(valley,))), reference)
    checkpoint = tmp_path / "model.tmsg"
    save_checkpoint(SiameseModel.distance_head(MODEL_CONFIG), checkpoint)
    config = PipelineConfig(
        ssc=SMALL_TILE_SSC,
        twc_keep=3,
        mtm_keep=2,
        reference_graph=GraphConfig(),
        output_dir=str(tmp_path / "run"),
    )

    result = find_analogs([tile], reference, config, checkpoint)

    assert result.best.id.startswith("t0-")
    assert result.stage_sizes["ssc"] == 3
    assert (tmp_path / "run" / "summary.json").is_file()


def test_find_analogs_reads_config_file(mocker, tmp_path):
    run = mocker.patch("terranalog.api.run_pipeline")
    mocker.patch("terranalog.api.named_grids", return_value=[])
    mocker.patch("terranalog.api.load_grid", return_value="grid")
    path = tmp_path / "run.json"
    path.write_text('{"seed": 9}', encoding="utf-8")
    model = SiameseModel.distance_head(MODEL_CONFIG)

    find_analogs([], "trench.asc", path, model)

    tiles, reference, config, passed = run.call_args.args
    assert (tiles, reference) == ([], "grid")
    assert config.seed == 9
    assert passed is model


def test_train_model(tmp_path):
    pairs, graphs = separable_benchmark(pair_count=20)
    graph_dir = tmp_path / "graphs"
    graph_dir.mkdir()
    for name, graph in graphs.items():
        write_graph(graph, graph_dir / f"{name}.graph")
    pairs_path = tmp_path / "pairs.csv"
    write_pair_dataset(pairs, pairs_path)
    config = PipelineConfig(
        model=MODEL_CONFIG,
        train=TrainConfig(learning_rate=0.01, batch_size=8, max_epochs=2),
    )

    model = train_model(pairs_path, graph_dir, config)

    assert isinstance(model, SiameseModel)
    score = model.score(graphs["g0000"], graphs["g0001"])
    assert 0.0 <= score <= 1.0
