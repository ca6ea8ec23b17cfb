import numpy as np
import pytest

from terranalog.core.raster import (
    DemGrid,
    read_binary_grid,
    read_binary_matrix,
    write_binary_grid,
    write_binary_matrix,
)
from terranalog.exception import GridFormatError


def test_grid_keeps_georeference_and_nodata(tmp_path):
    values = np.array([[1.5, 2.25], [-9999.0, 4.0]])
    grid = DemGrid(values, cell_size=30.0, origin=(500000.0, 4100060.0))
    path = tmp_path / "tile.tgrd"

    write_binary_grid(grid, path)
    loaded = read_binary_grid(path)

    assert loaded == grid
    assert loaded.cell_size == 30.0
    assert loaded.nodata_mask[1, 0]


def test_geographic_step_survives(tmp_path):
    step = 1.0 / 3600.0
    grid = DemGrid(
        np.zeros((2, 2)), cell_size=30.92, origin=(-120.0, 35.0), cell_degrees=step
    )
    path = tmp_path / "geo.tgrd"

    write_binary_grid(grid, path)
    loaded = read_binary_grid(path)

    assert loaded.geographic
    assert loaded.cell_degrees == pytest.approx(step, abs=1e-9)


def test_matrix_is_exact(tmp_path, rng):
    matrix = rng.normal(size=(4, 6))
    path = tmp_path / "m.tmat"

    write_binary_matrix(matrix, path)
    np.testing.assert_array_equal(read_binary_matrix(path), matrix)


# test cases for corrupt files
def test_bad_magic(tmp_path):
    path = tmp_path / "bad.tgrd"
    write_binary_grid(DemGrid(np.zeros((2, 2)), cell_size=1.0), path)
    path.write_bytes(b"XXXX" + path.read_bytes()[4:])

    with pytest.raises(GridFormatError) as e:
        read_binary_grid(path)
    assert "bad magic b'XXXX'" in str(e.value)


def test_truncated_payload(tmp_path):
    path = tmp_path / "short.tgrd"
    write_binary_grid(DemGrid(np.zeros((2, 2)), cell_size=1.0), path)
    path.write_bytes(path.read_bytes()[:-4])

    with pytest.raises(GridFormatError) as e:
        read_binary_grid(path)
    assert "does not match" in str(e.value)


def test_truncated_header(tmp_path):
    path = tmp_path / "empty.tmat"
    path.write_bytes(b"TMAT")
    with pytest.raises(GridFormatError) as e:
        read_binary_matrix(path)
    assert str(e.value).endswith("truncated header")


def test_matrix_rejects_grid_file(tmp_path):
    path = tmp_path / "tile.tgrd"
    write_binary_grid(DemGrid(np.zeros((2, 2)), cell_size=1.0), path)
    with pytest.raises(GridFormatError):
        read_binary_matrix(path)
