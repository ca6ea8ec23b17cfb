import numpy as np
import pytest

from terranalog.core.raster import (
    METERS_PER_DEGREE,
    DemGrid,
    load_ascii_grid,
    write_ascii_grid,
)
from terranalog.exception import GridFormatError

HEADER = """ncols 3
nrows 2
xllcorner 500000.0
yllcorner 4100000.0
cellsize 30
NODATA_value -9999
"""


def _write(tmp_path, text, name="tile.asc"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# test cases for valid grids
def test_load_projected_grid(tmp_path):
    path = _write(tmp_path, HEADER + "1 2 3\n4 -9999 6\n")
    grid = load_ascii_grid(path)

    assert grid.shape == (2, 3)
    assert grid.cell_size == 30.0
    assert not grid.geographic
    # the origin is the upper-left corner
    assert grid.origin == (500000.0, 4100000.0 + 2 * 30.0)
    np.testing.assert_array_equal(grid.nodata_mask, [[0, 0, 0], [0, 1, 0]])


def test_header_keys_are_case_insensitive(tmp_path):
    text = HEADER.upper() + "1 2 3\n4 5 6\n"
    assert load_ascii_grid(_write(tmp_path, text)).shape == (2, 3)


def test_cell_center_registration(tmp_path):
    text = HEADER.replace("xllcorner", "xllcenter").replace("yllcorner", "yllcenter")
    grid = load_ascii_grid(_write(tmp_path, text + "1 2 3\n4 5 6\n"))
    assert grid.origin == (500000.0 - 15.0, 4100000.0 - 15.0 + 60.0)


def test_geographic_grid_is_detected(tmp_path):
    step = 1.0 / 3600.0
    text = (
        f"ncols 2\nnrows 2\nxllcorner -120.0\nyllcorner 35.0\ncellsize {step!r}\n"
        "1 2\n3 4\n"
    )
    grid = load_ascii_grid(_write(tmp_path, text))

    assert grid.geographic
    assert grid.cell_degrees == step
    assert grid.cell_size == pytest.approx(step * METERS_PER_DEGREE)


def test_geographic_override(tmp_path):
    text = "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 0.01\n5\n"
    assert not load_ascii_grid(_write(tmp_path, text), geographic=False).geographic


def test_write_then_load_is_exact(tmp_path, rng):
    values = rng.normal(1000.0, 250.0, size=(7, 9))
    values[3, 4] = -9999.0
    grid = DemGrid(values, cell_size=30.0, origin=(123.456, 7890.125))
    path = tmp_path / "out.asc"

    write_ascii_grid(grid, path)
    loaded = load_ascii_grid(path)

    assert loaded == grid
    assert loaded.origin == grid.origin


def test_data_row_may_open_with_nan(tmp_path):
    grid = load_ascii_grid(_write(tmp_path, HEADER + "nan 2 3\n4 5 6\n"))
    np.testing.assert_array_equal(grid.nodata_mask, [[1, 0, 0], [0, 0, 0]])


# test cases for malformed grids
@pytest.mark.parametrize(
    "text, line, reason",
    [
        (HEADER.replace("cellsize", "cellsz") + "1 2 3\n4 5 6\n", 5,
         "unknown header key 'cellsz'"),
        (HEADER + "1 2 3\n4 5\n", 8, "expected 3 values, found 2"),
        (HEADER + "1 2 3\n4 x 6\n", 8, "non-numeric cell 'x'"),
        (HEADER + "x 2 3\n4 5 6\n", 7, "non-numeric cell 'x'"),
        (HEADER.replace("nrows 2\n", "nrows 2\nncols 3\n") + "1 2 3\n4 5 6\n", 3,
         "duplicate header key 'ncols'"),
        (HEADER + "1 2 3\n4 5 6\n7 8 9\n", 9, "more than 2 data rows"),
        (HEADER + "1 2 3\n", 7, "expected 2 rows, found 1"),
    ],
)
def test_malformed_grid_names_line(tmp_path, text, line, reason):
    path = _write(tmp_path, text)
    with pytest.raises(GridFormatError) as e:
        load_ascii_grid(path)

    assert e.value.line == line
    assert f"{path}:{line}: {reason}" == str(e.value)


def test_missing_header_key(tmp_path):
    text = HEADER.replace("cellsize 30\n", "") + "1 2 3\n4 5 6\n"
    with pytest.raises(GridFormatError) as e:
        load_ascii_grid(_write(tmp_path, text))
    assert "missing header key cellsize" in str(e.value)
