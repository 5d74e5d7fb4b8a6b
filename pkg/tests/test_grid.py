import numpy as np
import pytest

from emlab.errors import GridMismatchError
from emlab.grid import (GridSpec, ScalarField, VectorField, read_field,
                        require_same_grid, write_field)


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(dims=(3, 8, 8), h=0.1)
    with pytest.raises(ValueError):
        GridSpec(dims=(8, 8, 8), h=0.0)
    with pytest.raises(ValueError):
        GridSpec(dims=(8, 8, 8), h=0.1, boundary="dirichlet")
    g = GridSpec(dims=(4, 5, 6), h=0.25, origin=(1.0, 2.0, 3.0))
    assert g.n_nodes == 120
    assert g.cell_volume == pytest.approx(0.25**3)


def test_cube_covers_box():
    g = GridSpec.cube(8, length=2.0 * np.pi)
    x, y, z = g.axes()
    assert x[0] == 0.0
    assert x[-1] == pytest.approx(2.0 * np.pi - g.h)


def test_field_shape_validation():
    g = GridSpec.cube(4)
    with pytest.raises(ValueError):
        ScalarField(g, np.zeros((4, 4)))
    with pytest.raises(ValueError):
        VectorField(g, np.zeros((4, 4, 4)))
    s = ScalarField.zeros(g)
    v = VectorField.zeros(g)
    assert s.values.shape == (4, 4, 4)
    assert v.values.shape == (4, 4, 4, 3)


def test_require_same_grid():
    a = VectorField.zeros(GridSpec.cube(4))
    b = VectorField.zeros(GridSpec.cube(5))
    with pytest.raises(GridMismatchError):
        require_same_grid(a, b)


def test_field_arithmetic_allocates_fresh():
    g = GridSpec.cube(4)
    a = VectorField.constant(g, (1.0, 2.0, 3.0))
    b = VectorField.constant(g, (0.5, 0.5, 0.5))
    c = a + b
    assert np.all(c.values[0, 0, 0] == (1.5, 2.5, 3.5))
    assert np.all(a.values[0, 0, 0] == (1.0, 2.0, 3.0))
    d = 2.0 * a
    assert np.all(d.values[0, 0, 0] == (2.0, 4.0, 6.0))


@pytest.mark.parametrize("fmt,ext", [("csv", "csv"), ("npz", "npz")])
def test_dump_roundtrip_vector(tmp_path, fmt, ext):
    g = GridSpec(dims=(4, 5, 6), h=0.3, origin=(0.1, 0.2, 0.3))
    rng = np.random.default_rng(42)
    f = VectorField(g, rng.normal(size=g.dims + (3,)))
    path = tmp_path / f"field.{ext}"
    write_field(f, path, fmt=fmt)
    back = read_field(path)
    assert back.grid == g
    np.testing.assert_array_equal(back.values, f.values)


def test_dump_roundtrip_scalar(tmp_path):
    g = GridSpec.cube(4)
    rng = np.random.default_rng(7)
    f = ScalarField(g, rng.normal(size=g.dims))
    path = tmp_path / "field.csv"
    write_field(f, path)
    back = read_field(path)
    assert isinstance(back, ScalarField)
    np.testing.assert_array_equal(back.values, f.values)
