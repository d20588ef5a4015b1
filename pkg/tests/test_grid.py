import numpy as np
import pytest

from bandext.grid import Grid, nd_axis, tensor_component_names, tensor_components


def test_box_spacing_and_shape():
    g = Grid.box(5, dim=2)
    assert g.dim == 2
    assert g.h == (0.5, 0.5)
    assert g.min_h == 0.5
    assert g.shape == (5, 5)
    assert g.size == 25
    assert g.diag == pytest.approx(np.sqrt(0.5), rel=1e-15)


def test_non_square_box():
    g = Grid((5, 9), (0.0, -1.0), (1.0, 1.0))
    assert g.h == (0.25, 0.25)
    assert g.shape == (9, 5)  # (ny, nx)
    g2 = Grid.box((4, 6, 8), dim=3)
    assert g2.shape == (8, 6, 4)
    assert g2.h[0] == pytest.approx(2.0 / 3.0)


def test_endpoints_exact():
    g = Grid.box(64, dim=2)
    x = g.axis_coords(0)
    assert x[0] == -1.0 and x[-1] == 1.0
    assert g.node_coord((0, 0)) == (-1.0, -1.0)
    # node_coord builds from lo + i*h; the far corner may carry rounding
    far = g.node_coord((63, 63))
    assert far[0] == pytest.approx(1.0, abs=1e-15)


def test_coords_layout_x_fastest():
    g = Grid.box(4, dim=2)
    X, Y = g.coords()
    assert X.shape == Y.shape == (4, 4)
    # x varies along the last array axis, y along the first
    assert np.all(X[0] == g.axis_coords(0))
    assert np.all(Y[:, 0] == g.axis_coords(1))
    flat = X.ravel()
    assert flat[1] != flat[0]  # x fastest in ravel order


def test_coords_layout_3d():
    g = Grid.box(4, dim=3)
    X, Y, Z = g.coords()
    assert X.shape == (4, 4, 4)
    assert np.all(Z[:, 0, 0] == g.axis_coords(2))
    assert np.all(X[0, 0, :] == g.axis_coords(0))


def test_sample_matches_manual_eval():
    g = Grid.box(16, dim=2)
    f = g.sample(lambda x, y: np.sin(x) + 2.0 * y)
    X, Y = g.coords()
    np.testing.assert_array_equal(f, np.sin(X) + 2.0 * Y)
    # scalar-valued callables broadcast
    c = g.sample(lambda x, y: 3.5)
    assert c.shape == g.shape and np.all(c == 3.5)


def test_sample_rejects_nonfinite_and_names_node():
    g = Grid.box(8, dim=2)

    def bad(x, y):
        out = x * 0.0
        out[3, 5] = np.inf  # array index (j=3, i=5) -> node (5, 3)
        return out

    with pytest.raises(ValueError, match=r"node \(5, 3\)"):
        g.sample(bad)


def test_validation():
    with pytest.raises(ValueError, match="2D or 3D"):
        Grid((5,), (0.0,), (1.0,))
    with pytest.raises(ValueError, match="at least 4"):
        Grid.box(3, dim=2)
    with pytest.raises(ValueError, match="positive extent"):
        Grid((5, 5), (0.0, 1.0), (1.0, 1.0))
    with pytest.raises(ValueError, match="same length"):
        Grid((5, 5), (0.0,), (1.0, 1.0))


def test_node_coord_range_checks():
    g = Grid.box(5, dim=2)
    with pytest.raises(IndexError):
        g.node_coord((5, 0))
    with pytest.raises(ValueError):
        g.node_coord((1, 2, 3))


def test_axis_mapping():
    assert nd_axis(2, 0) == 1 and nd_axis(2, 1) == 0
    assert nd_axis(3, 0) == 2 and nd_axis(3, 2) == 0
    assert tensor_components(2) == ((0, 0), (0, 1), (1, 1))
    assert tensor_components(3) == ((0, 0), (0, 1), (1, 1), (0, 2), (1, 2), (2, 2))
    assert tensor_component_names(2) == ("xx", "xy", "yy")
    assert tensor_component_names(3) == ("xx", "xy", "yy", "xz", "yz", "zz")
