"""Uniform periodic grid geometry and node-collocated field storage.

All fields live on a single collocated lattice: scalars are (nx, ny, nz)
arrays, vectors are (nx, ny, nz, 3) with the Cartesian component last.
Operators treat fields as immutable values and allocate fresh outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GridMismatchError

MIN_DIM = 4  # central-difference stencil needs at least 4 nodes per axis


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a uniform periodic box.

    dims: nodes per axis (>= 4 each); h: uniform node spacing; origin:
    position of node (0,0,0). Only periodic boundaries are supported.
    """

    dims: tuple[int, int, int]
    h: float
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    boundary: str = "periodic"

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "origin", tuple(float(x) for x in self.origin))
        if len(dims) != 3 or any(n < MIN_DIM for n in dims):
            raise ValueError(f"dims must be 3 integers >= {MIN_DIM}, got {self.dims}")
        if not self.h > 0.0:
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        if self.boundary != "periodic":
            raise ValueError(f"unsupported boundary {self.boundary!r}; only 'periodic' exists")

    @property
    def n_nodes(self) -> int:
        nx, ny, nz = self.dims
        return nx * ny * nz

    @property
    def cell_volume(self) -> float:
        return self.h ** 3

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(
            self.origin[a] + self.h * np.arange(self.dims[a]) for a in range(3)
        )

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    @classmethod
    def cube(cls, n: int, length: float = 2.0 * np.pi, origin=(0.0, 0.0, 0.0)) -> "GridSpec":
        """n^3 grid covering a periodic box of the given edge length."""
        return cls(dims=(n, n, n), h=length / n, origin=origin)


def _as_array(values, shape, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != shape:
        raise ValueError(f"{what} values must have shape {shape}, got {arr.shape}")
    return arr


@dataclass
class ScalarField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = _as_array(self.values, self.grid.dims, "scalar field")

    @classmethod
    def zeros(cls, grid: GridSpec) -> "ScalarField":
        return cls(grid, np.zeros(grid.dims))

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "ScalarField":
        X, Y, Z = grid.meshgrid()
        return cls(grid, np.asarray(fn(X, Y, Z), dtype=np.float64))

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def __add__(self, other: "ScalarField") -> "ScalarField":
        require_same_grid(self, other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        require_same_grid(self, other)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, a: float) -> "ScalarField":
        return ScalarField(self.grid, self.values * float(a))

    __rmul__ = __mul__


@dataclass
class VectorField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = _as_array(self.values, self.grid.dims + (3,), "vector field")

    @classmethod
    def zeros(cls, grid: GridSpec) -> "VectorField":
        return cls(grid, np.zeros(grid.dims + (3,)))

    @classmethod
    def constant(cls, grid: GridSpec, v) -> "VectorField":
        out = np.empty(grid.dims + (3,))
        out[...] = np.asarray(v, dtype=np.float64)
        return cls(grid, out)

    @classmethod
    def from_functions(cls, grid: GridSpec, fx, fy, fz) -> "VectorField":
        X, Y, Z = grid.meshgrid()
        out = np.empty(grid.dims + (3,))
        for i, fn in enumerate((fx, fy, fz)):
            out[..., i] = fn(X, Y, Z)
        return cls(grid, out)

    def component(self, i: int) -> np.ndarray:
        return self.values[..., i]

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.values.copy())

    def __add__(self, other: "VectorField") -> "VectorField":
        require_same_grid(self, other)
        return VectorField(self.grid, self.values + other.values)

    def __sub__(self, other: "VectorField") -> "VectorField":
        require_same_grid(self, other)
        return VectorField(self.grid, self.values - other.values)

    def __mul__(self, a: float) -> "VectorField":
        return VectorField(self.grid, self.values * float(a))

    __rmul__ = __mul__


Field = ScalarField | VectorField


def require_same_grid(*fields: Field) -> GridSpec:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"fields live on different grids: {grid} vs {f.grid}")
    return grid


# ---------------------------------------------------------------------------
# Dump format.
#
# CSV (portable default): one metadata line, one column-header line, then one
# row per node in C order:
#   # emlab-field kind=<scalar|vector> dims=nx,ny,nz h=<spacing> origin=ox,oy,oz
#   ix,iy,iz,v            (scalar)
#   ix,iy,iz,vx,vy,vz     (vector)
# NPZ (optional binary) stores the same metadata as arrays.
# ---------------------------------------------------------------------------

SCALAR_CSV_HEADER = "ix,iy,iz,v"
VECTOR_CSV_HEADER = "ix,iy,iz,vx,vy,vz"


def _meta_line(field: Field) -> str:
    kind = "scalar" if isinstance(field, ScalarField) else "vector"
    g = field.grid
    dims = ",".join(str(n) for n in g.dims)
    origin = ",".join(repr(x) for x in g.origin)
    return f"# emlab-field kind={kind} dims={dims} h={g.h!r} origin={origin}"


def write_field_csv(field: Field, path) -> None:
    g = field.grid
    idx = np.indices(g.dims).reshape(3, -1).T.astype(np.float64)
    if isinstance(field, ScalarField):
        data = np.column_stack([idx, field.values.reshape(-1)])
        header = SCALAR_CSV_HEADER
        fmt = ["%d", "%d", "%d", "%.17g"]
    else:
        data = np.column_stack([idx, field.values.reshape(-1, 3)])
        header = VECTOR_CSV_HEADER
        fmt = ["%d", "%d", "%d", "%.17g", "%.17g", "%.17g"]
    with open(path, "w") as fh:
        fh.write(_meta_line(field) + "\n")
        fh.write(header + "\n")
        np.savetxt(fh, data, fmt=fmt, delimiter=",")


def _parse_meta(line: str) -> dict:
    if not line.startswith("# emlab-field "):
        raise ValueError(f"not an emlab field dump: {line[:60]!r}")
    meta = {}
    for token in line[len("# emlab-field "):].split():
        key, _, val = token.partition("=")
        meta[key] = val
    return meta


def read_field_csv(path) -> Field:
    with open(path) as fh:
        meta = _parse_meta(fh.readline().strip())
        fh.readline()  # column header
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    dims = tuple(int(n) for n in meta["dims"].split(","))
    origin = tuple(float(x) for x in meta["origin"].split(","))
    grid = GridSpec(dims=dims, h=float(meta["h"]), origin=origin)
    if data.shape[0] != grid.n_nodes:
        raise ValueError(f"dump row count {data.shape[0]} != node count {grid.n_nodes}")
    order = np.lexsort((data[:, 2], data[:, 1], data[:, 0]))
    data = data[order]
    if meta["kind"] == "scalar":
        return ScalarField(grid, data[:, 3].reshape(dims))
    return VectorField(grid, data[:, 3:6].reshape(dims + (3,)))


def write_field_npz(field: Field, path) -> None:
    kind = "scalar" if isinstance(field, ScalarField) else "vector"
    g = field.grid
    np.savez_compressed(
        path, kind=kind, values=field.values, h=g.h, origin=np.asarray(g.origin),
        dims=np.asarray(g.dims),
    )


def read_field_npz(path) -> Field:
    with np.load(path) as data:
        grid = GridSpec(
            dims=tuple(int(n) for n in data["dims"]),
            h=float(data["h"]),
            origin=tuple(float(x) for x in data["origin"]),
        )
        values = np.array(data["values"])
        kind = str(data["kind"])
    return ScalarField(grid, values) if kind == "scalar" else VectorField(grid, values)


def write_field(field: Field, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        write_field_csv(field, path)
    elif fmt == "npz":
        write_field_npz(field, path)
    else:
        raise ValueError(f"unknown dump format {fmt!r}")


def read_field(path) -> Field:
    path = Path(path)
    if path.suffix == ".npz":
        return read_field_npz(path)
    return read_field_csv(path)
