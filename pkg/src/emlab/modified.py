"""Core solver: field equations coupled to the mean current velocity.

The electric-field rate carries three extra terms driven by the global
mean velocity ubar(t) and its time derivative: advection of the curl of E,
the acceleration coupling to B, and the curl of the transported invariant
combination E + ubar x B.  With ubar = ubar_dot = 0 every extra term is
identically zero and the assembly delegates to the classical path, so the
two solvers produce bit-identical output there.
"""

from __future__ import annotations

import numpy as np

from .constants import PhysicalConstants
from .errors import EmptySupportError
from .grid import ScalarField, VectorField
from .operators import cross, curl, divergence, l2_norm, max_norm
from .classical import classical_rhs
from .reporting import ResidualEntry, ResidualReport
from .solver import EMState, SolverConfig, SourceModel, STATIC_SOURCES, rk4_step


def invariant_field(E: VectorField, B: VectorField, ubar) -> VectorField:
    """The combination E + ubar x B entering the constraint and transport term."""
    return VectorField(E.grid, E.values + np.cross(ubar, B.values))


def modified_rhs_terms(state: EMState, k: PhysicalConstants) -> dict[str, np.ndarray]:
    """Named contributions to dE/dt, separately retrievable for debugging."""
    c2 = 1.0 / (k.eps0 * k.mu0)
    curl_e = curl(state.E)
    combo = invariant_field(state.E, state.B, state.ubar)
    return {
        "curl_advection": np.cross(state.ubar, curl_e.values),
        "acceleration": -np.cross(state.ubar_dot, state.B.values),
        "transport": curl(cross(state.ubar, combo)).values,
        "displacement": c2 * curl(state.B).values,
        "current_drive": -state.J.values / k.eps0,
    }


def modified_rhs(state: EMState, k: PhysicalConstants):
    """Rates (dE/dt, dB/dt, drho/dt) of the mean-velocity-coupled system.

    Exact reduction: when ubar and ubar_dot are exactly zero the extra
    terms vanish identically, so the classical assembly is evaluated
    instead (same operations in the same order, hence bitwise equality).
    """
    if not (np.any(state.ubar) or np.any(state.ubar_dot)):
        return classical_rhs(state, k)
    terms = modified_rhs_terms(state, k)
    dE = (
        terms["curl_advection"]
        + terms["acceleration"]
        + terms["transport"]
        + terms["displacement"]
        + terms["current_drive"]
    )
    dB = -curl(state.E).values
    drho = -divergence(state.J).values
    return dE, dB, drho


def step_modified(state: EMState, cfg: SolverConfig,
                  sources: SourceModel = STATIC_SOURCES) -> EMState:
    dt = cfg.resolve_dt(state.grid)
    return rk4_step(state, modified_rhs, dt, cfg.constants, sources)


def modified_gauss_residual(state: EMState, k: PhysicalConstants) -> ResidualReport:
    """Norms of div(E + ubar x B) - rho/eps0 and div(B)."""
    h = state.grid.h
    combo = invariant_field(state.E, state.B, state.ubar)
    gauss_e = ScalarField(state.grid,
                          divergence(combo).values - state.rho.values / k.eps0)
    gauss_b = divergence(state.B)
    report = ResidualReport()
    report.add(ResidualEntry("gauss_electric_modified", max_norm(gauss_e),
                             l2_norm(gauss_e), h=h, time=state.t))
    report.add(ResidualEntry("gauss_magnetic", max_norm(gauss_b), l2_norm(gauss_b),
                             h=h, time=state.t))
    return report


def mean_velocity_from_state(
    state: EMState,
    rho_floor: float | None = None,
    fallback=None,
) -> np.ndarray:
    """Mean of the pointwise velocity J/rho over nodes carrying charge.

    Nodes qualify when |rho| exceeds rho_floor (default 1e-12 times the
    state's max |rho|); with no qualifying nodes the configured fallback is
    returned, or EmptySupportError is raised when none was given.
    """
    rho = state.rho.values
    if rho_floor is None:
        rho_floor = 1e-12 * float(np.max(np.abs(rho)))
    support = np.abs(rho) > rho_floor
    if not np.any(support):
        if fallback is None:
            raise EmptySupportError(
                f"no nodes with |rho| > {rho_floor:g} and no fallback configured"
            )
        return np.asarray(fallback, dtype=np.float64)
    u = state.J.values[support] / rho[support, None]
    return np.mean(u, axis=0)


def ampere_deficit(
    E: VectorField,
    B: VectorField,
    J: VectorField,
    ubar,
    ubar_dot,
    dE_dt: VectorField,
    k: PhysicalConstants,
) -> VectorField:
    """Left side minus right side of the modified electric-field equation.

    Takes the time-derivative field as data so trajectory diagnostics can
    supply centered time differences.
    """
    c2 = 1.0 / (k.eps0 * k.mu0)
    combo = invariant_field(E, B, ubar)
    vals = (
        dE_dt.values
        - np.cross(ubar, curl(E).values)
        + np.cross(ubar_dot, B.values)
        - curl(cross(ubar, combo)).values
        - c2 * curl(B).values
        + J.values / k.eps0
    )
    return VectorField(E.grid, vals)
