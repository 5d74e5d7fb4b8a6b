"""Discrete vector calculus on the periodic collocated grid.

Second-order central differences with periodic wraparound, written as
np.roll stencils. Every operator is a pure function of immutable inputs
and allocates a fresh output, so results are independent of any evaluation
partitioning.
"""

from __future__ import annotations

import numpy as np

from .errors import GridMismatchError
from .grid import GridSpec, ScalarField, VectorField, require_same_grid


def _diff(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Central difference along one spatial axis, periodic wrap."""
    return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2.0 * h)


def curl(f: VectorField) -> VectorField:
    h = f.grid.h
    fx, fy, fz = f.values[..., 0], f.values[..., 1], f.values[..., 2]
    out = np.empty_like(f.values)
    out[..., 0] = _diff(fz, h, 1) - _diff(fy, h, 2)
    out[..., 1] = _diff(fx, h, 2) - _diff(fz, h, 0)
    out[..., 2] = _diff(fy, h, 0) - _diff(fx, h, 1)
    return VectorField(f.grid, out)


def divergence(f: VectorField) -> ScalarField:
    h = f.grid.h
    out = (
        _diff(f.values[..., 0], h, 0)
        + _diff(f.values[..., 1], h, 1)
        + _diff(f.values[..., 2], h, 2)
    )
    return ScalarField(f.grid, out)


def gradient(s: ScalarField) -> VectorField:
    h = s.grid.h
    out = np.empty(s.grid.dims + (3,))
    for axis in range(3):
        out[..., axis] = _diff(s.values, h, axis)
    return VectorField(s.grid, out)


def directional_derivative(b: VectorField, a: VectorField) -> VectorField:
    """Convective term (b . grad) a, one central difference per axis."""
    grid = require_same_grid(b, a)
    h = grid.h
    out = np.zeros_like(a.values)
    for axis in range(3):
        out += b.values[..., axis, None] * _diff(a.values, h, axis)
    return VectorField(grid, out)


def _vec_values(v, grid: GridSpec) -> np.ndarray:
    """Accept a VectorField on `grid` or a plain 3-vector (broadcast)."""
    if isinstance(v, VectorField):
        if v.grid != grid:
            raise GridMismatchError(f"fields live on different grids: {v.grid} vs {grid}")
        return v.values
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape != (3,):
        raise ValueError(f"expected a VectorField or 3-vector, got shape {arr.shape}")
    return arr


def cross(a, b: VectorField) -> VectorField:
    av = _vec_values(a, b.grid)
    return VectorField(b.grid, np.cross(av, b.values))


def dot(a, b: VectorField) -> ScalarField:
    av = _vec_values(a, b.grid)
    return ScalarField(b.grid, np.sum(av * b.values, axis=-1))


def scale(a, f):
    """Pointwise scaling: scalar constant or ScalarField times a field."""
    if isinstance(a, ScalarField):
        require_same_grid(a, f)
        if isinstance(f, VectorField):
            return VectorField(f.grid, a.values[..., None] * f.values)
        return ScalarField(f.grid, a.values * f.values)
    return f * float(a)


def add(f, g):
    return f + g


# ---------------------------------------------------------------------------
# Norm diagnostics.  l2 approximates the continuum L2 norm over the box via
# the midpoint rule, so refinement studies can be compared against analytic
# limits; reductions run in fixed C order for reproducibility.
# ---------------------------------------------------------------------------

def max_norm(f) -> float:
    return float(np.max(np.abs(f.values)))


def l2_norm(f) -> float:
    v = f.values
    if isinstance(f, VectorField):
        sq = np.sum(v * v, axis=-1)
    else:
        sq = v * v
    return float(np.sqrt(f.grid.cell_volume * np.sum(sq)))


# ---------------------------------------------------------------------------
# Periodic Poisson solves for electrostatic initial data: find E = -grad(phi)
# with div E = rho/eps0.  Two symbol choices:
#   "central":  inverts the composition div(grad .) of the central-difference
#               operators, so the *discrete* Gauss law holds to round-off;
#   "spectral": inverts the continuum Laplacian, giving initial data whose
#               discrete Gauss residual carries the usual O(h^2) truncation.
# Modes annihilated by the symbol (mean, pure Nyquist combinations for
# "central") are dropped; rho must integrate to ~zero over the box.
# ---------------------------------------------------------------------------

def electrostatic_field_from_density(
    rho: ScalarField, eps0: float, symbol: str = "central"
) -> VectorField:
    grid = rho.grid
    h = grid.h
    rhs = np.fft.fftn(rho.values / eps0)
    ks = [2.0 * np.pi * np.fft.fftfreq(n, d=h) for n in grid.dims]
    kx, ky, kz = np.meshgrid(*ks, indexing="ij")
    if symbol == "central":
        lap = -(np.sin(kx * h) ** 2 + np.sin(ky * h) ** 2 + np.sin(kz * h) ** 2) / h**2
    elif symbol == "spectral":
        lap = -(kx**2 + ky**2 + kz**2)
    else:
        raise ValueError(f"unknown Poisson symbol {symbol!r}")
    good = np.abs(lap) > 1e-14 / h**2
    phi_hat = np.zeros_like(rhs)
    phi_hat[good] = -rhs[good] / lap[good]
    phi = ScalarField(grid, np.real(np.fft.ifftn(phi_hat)))
    if symbol == "central":
        return -1.0 * gradient(phi)
    ex = np.real(np.fft.ifftn(-1j * kx * phi_hat))
    ey = np.real(np.fft.ifftn(-1j * ky * phi_hat))
    ez = np.real(np.fft.ifftn(-1j * kz * phi_hat))
    return VectorField(grid, np.stack([ex, ey, ez], axis=-1))
