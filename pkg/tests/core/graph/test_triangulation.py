import numpy as np
import pytest

from terranalog.core.graph import delaunay, delaunay_triangles
from terranalog.exception import StageInputError


def test_square_tie_resolves_by_node_order():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    np.testing.assert_array_equal(
        delaunay(square), [[0, 1], [0, 2], [0, 3], [1, 2], [2, 3]]
    )


def test_rotated_square_keeps_diagonal_from_first_node():
    square = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
    edges = delaunay(square)
    assert len(edges) == 5
    assert [0, 2] in edges.tolist()


def test_grid_of_points_is_reproducible():
    xx, yy = np.meshgrid(np.arange(5.0), np.arange(4.0))
    points = np.column_stack([xx.ravel(), yy.ravel()])
    first = delaunay(points)

    np.testing.assert_array_equal(first, delaunay(points.copy()))
    # a triangulated 5x4 lattice has 4*3 cells with one diagonal each
    assert len(first) == 4 * 4 + 5 * 3 + 12


def test_collinear_nodes_form_a_chain():
    points = np.array([[0.0, 0.0], [2.0, 2.0], [1.0, 1.0], [3.0, 3.0]])
    np.testing.assert_array_equal(delaunay(points), [[0, 2], [1, 2], [1, 3]])


def test_random_points_give_planar_edge_count(rng):
    points = rng.uniform(0.0, 1000.0, size=(40, 2))
    edges = delaunay(points)
    triangles = delaunay_triangles(points)

    assert np.all(edges[:, 0] < edges[:, 1])
    assert len(np.unique(edges, axis=0)) == len(edges)
    # Euler: E = V + F - 1 for a triangulated disk
    assert len(edges) == len(points) + len(triangles) - 1


def test_reject_two_nodes():
    with pytest.raises(StageInputError) as e:
        delaunay(np.zeros((2, 2)))
    assert "Triangulation needs at least 3 nodes, got 2." == str(e.value)
