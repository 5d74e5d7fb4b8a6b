"""Closed-form point-charge and charge-cloud field kernels.

Point-charge kernels: the Coulomb field, the Biot-Savart field of the
moving charge, the motion-induced electric field -u x B, their sum, and
the combination E + u x B which collapses back to the pure Coulomb field.
Cloud quantities are midpoint-rule superpositions of the point kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import PhysicalConstants
from .errors import EmptySupportError, SingularPointError
from .grid import ScalarField, VectorField, require_same_grid

DEFAULT_SINGULARITY_CUTOFF = 1e-9  # meters; below this the kernels refuse to evaluate


@dataclass
class PointCharge:
    """Charge q at position, moving with a sub-light velocity."""

    q: float
    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    constants: PhysicalConstants = field(default_factory=PhysicalConstants.si)

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=np.float64)
        self.velocity = np.asarray(self.velocity, dtype=np.float64)
        if self.position.shape != (3,) or self.velocity.shape != (3,):
            raise ValueError("position and velocity must be 3-vectors")
        speed = float(np.linalg.norm(self.velocity))
        if speed >= self.constants.c:
            raise ValueError(
                f"kernel formulas require |u| < c, got |u|={speed:g} with c={self.constants.c:g}"
            )


def _separation(pc: PointCharge, point, cutoff: float):
    r_vec = np.asarray(point, dtype=np.float64) - pc.position
    r = float(np.linalg.norm(r_vec))
    if r < cutoff:
        raise SingularPointError(
            f"evaluation point within {cutoff:g} of the charge (|r|={r:g})"
        )
    return r_vec, r


def coulomb_E(pc: PointCharge, point, cutoff: float = DEFAULT_SINGULARITY_CUTOFF) -> np.ndarray:
    """Electrostatic field q*r / (4 pi eps0 r^3)."""
    r_vec, r = _separation(pc, point, cutoff)
    return pc.q * r_vec / (4.0 * np.pi * pc.constants.eps0 * r**3)


def biot_savart_B(pc: PointCharge, point, cutoff: float = DEFAULT_SINGULARITY_CUTOFF) -> np.ndarray:
    """Magnetic field (mu0 q / 4 pi r^3) u x r of the moving charge."""
    r_vec, r = _separation(pc, point, cutoff)
    return pc.constants.mu0 * pc.q / (4.0 * np.pi * r**3) * np.cross(pc.velocity, r_vec)


def motion_E2(pc: PointCharge, point, cutoff: float = DEFAULT_SINGULARITY_CUTOFF) -> np.ndarray:
    """Electric field attributed to the motion of the magnetic field.

    Expanded form (mu0 q / 4 pi r^3) (|u|^2 r - (u.r) u); agrees with
    -u x biot_savart_B to round-off.
    """
    r_vec, r = _separation(pc, point, cutoff)
    u = pc.velocity
    coeff = pc.constants.mu0 * pc.q / (4.0 * np.pi * r**3)
    return coeff * (float(u @ u) * r_vec - float(u @ r_vec) * u)


def total_E_moving(pc: PointCharge, point, cutoff: float = DEFAULT_SINGULARITY_CUTOFF) -> np.ndarray:
    """Full electric field of the uniformly moving charge: Coulomb + motion term."""
    return coulomb_E(pc, point, cutoff) + motion_E2(pc, point, cutoff)


def total_E_moving_beta_form(
    pc: PointCharge, point, cutoff: float = DEFAULT_SINGULARITY_CUTOFF
) -> np.ndarray:
    """Same field grouped as (1+beta^2) Coulomb minus the (u.r) u correction.

    Kept as an independent evaluation path for cross-checking.
    """
    r_vec, r = _separation(pc, point, cutoff)
    k = pc.constants
    beta = float(np.linalg.norm(pc.velocity)) / k.c
    radial = pc.q * r_vec / (4.0 * np.pi * k.eps0 * r**3) * (1.0 + beta**2)
    axial = k.mu0 * pc.q / (4.0 * np.pi * r**3) * float(pc.velocity @ r_vec) * pc.velocity
    return radial - axial


def invariant_combo(pc: PointCharge, point, cutoff: float = DEFAULT_SINGULARITY_CUTOFF) -> np.ndarray:
    """E + u x B for the moving charge; equals the Coulomb field identically."""
    return total_E_moving(pc, point, cutoff) + np.cross(
        pc.velocity, biot_savart_B(pc, point, cutoff)
    )


@dataclass
class ChargeCloud:
    """Grid-sampled charge density, velocity, and support mask.

    The current density is rho*u pointwise.  The mask marks nodes that
    belong to the charged region; cloud averages and superpositions run
    over masked nodes only, in fixed C order.
    """

    density: ScalarField
    velocity: VectorField
    mask: np.ndarray
    constants: PhysicalConstants = field(default_factory=PhysicalConstants.si)

    def __post_init__(self):
        require_same_grid(self.density, self.velocity)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.shape != self.density.grid.dims:
            raise ValueError(
                f"mask shape {self.mask.shape} does not match grid {self.density.grid.dims}"
            )

    @property
    def grid(self):
        return self.density.grid

    def current(self) -> VectorField:
        return VectorField(
            self.grid, self.density.values[..., None] * self.velocity.values
        )

    def support_volume(self) -> float:
        return float(np.count_nonzero(self.mask)) * self.grid.cell_volume

    def masked_positions(self) -> np.ndarray:
        X, Y, Z = self.grid.meshgrid()
        return np.column_stack([X[self.mask], Y[self.mask], Z[self.mask]])


def mean_velocity(cloud: ChargeCloud) -> np.ndarray:
    """Volume average of the velocity over the support mask."""
    volume = cloud.support_volume()
    if volume == 0.0:
        raise EmptySupportError("mean velocity requested over an empty mask")
    dv = cloud.grid.cell_volume
    total = np.sum(cloud.velocity.values[cloud.mask], axis=0) * dv
    return total / volume


def _cloud_terms(cloud: ChargeCloud, point, skip_radius: float | None, policy: str):
    """Per-node positions, charges, velocities, separations for quadrature."""
    point = np.asarray(point, dtype=np.float64)
    if skip_radius is None:
        skip_radius = 0.5 * cloud.grid.h
    positions = cloud.masked_positions()
    r_vecs = point - positions
    dists = np.linalg.norm(r_vecs, axis=1)
    near = dists < skip_radius
    if np.any(near):
        if policy == "error":
            raise SingularPointError(
                f"{int(np.count_nonzero(near))} masked node(s) within {skip_radius:g} of the point"
            )
        keep = ~near
        positions, r_vecs, dists = positions[keep], r_vecs[keep], dists[keep]
        charges = cloud.density.values[cloud.mask][keep]
        velocities = cloud.velocity.values[cloud.mask][keep]
    else:
        charges = cloud.density.values[cloud.mask]
        velocities = cloud.velocity.values[cloud.mask]
    return charges, velocities, r_vecs, dists


def cloud_B_superposition(
    cloud: ChargeCloud, point, skip_radius: float | None = None, policy: str = "skip"
) -> np.ndarray:
    """Midpoint-rule superposition of the per-node Biot-Savart fields.

    Nodes closer to the point than skip_radius (default h/2) are omitted;
    policy="error" raises instead.
    """
    charges, velocities, r_vecs, dists = _cloud_terms(cloud, point, skip_radius, policy)
    dv = cloud.grid.cell_volume
    coeff = cloud.constants.mu0 / (4.0 * np.pi) * charges * dv / dists**3
    return np.sum(coeff[:, None] * np.cross(velocities, r_vecs), axis=0)


def b_definition_residual(
    cloud: ChargeCloud, point, skip_radius: float | None = None, policy: str = "skip"
) -> np.ndarray:
    """Gap between ubar x B(superposed) and the velocity-weighted superposition.

    The superposed Biot-Savart field is the constructive definition of the
    cloud's B; this diagnostic measures how far it is from satisfying the
    mean-velocity factorization that the field equations assume.  Zero (to
    quadrature tolerance) for uniform cloud velocity.
    """
    ubar = mean_velocity(cloud)
    b_sup = cloud_B_superposition(cloud, point, skip_radius, policy)
    charges, velocities, r_vecs, dists = _cloud_terms(cloud, point, skip_radius, policy)
    dv = cloud.grid.cell_volume
    coeff = cloud.constants.mu0 / (4.0 * np.pi) * charges * dv / dists**3
    per_node_b = coeff[:, None] * np.cross(velocities, r_vecs)
    weighted = np.sum(np.cross(velocities, per_node_b), axis=0)
    return np.cross(ubar, b_sup) - weighted
