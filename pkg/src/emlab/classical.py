"""Baseline solver: standard vacuum field equations on the periodic grid.

The current density is prescribed data; the charge density evolves from
the continuity equation.  The divergence constraints are monitored, never
enforced.
"""

from __future__ import annotations

import numpy as np

from .constants import PhysicalConstants
from .grid import ScalarField, VectorField
from .operators import curl, divergence, l2_norm, max_norm
from .reporting import ResidualEntry, ResidualReport
from .solver import EMState, SolverConfig, SourceModel, STATIC_SOURCES, rk4_step


def classical_rhs(state: EMState, k: PhysicalConstants):
    """Rates (dE/dt, dB/dt, drho/dt) of the standard system."""
    c2 = 1.0 / (k.eps0 * k.mu0)
    dB = -curl(state.E).values
    dE = c2 * curl(state.B).values - state.J.values / k.eps0
    drho = -divergence(state.J).values
    return dE, dB, drho


def step_classical(state: EMState, cfg: SolverConfig,
                   sources: SourceModel = STATIC_SOURCES) -> EMState:
    dt = cfg.resolve_dt(state.grid)
    return rk4_step(state, classical_rhs, dt, cfg.constants, sources)


def classical_gauss_residual(state: EMState, k: PhysicalConstants) -> ResidualReport:
    """Norms of div(E) - rho/eps0 and div(B)."""
    h = state.grid.h
    gauss_e = ScalarField(state.grid,
                          divergence(state.E).values - state.rho.values / k.eps0)
    gauss_b = divergence(state.B)
    report = ResidualReport()
    report.add(ResidualEntry("gauss_electric", max_norm(gauss_e), l2_norm(gauss_e),
                             h=h, time=state.t))
    report.add(ResidualEntry("gauss_magnetic", max_norm(gauss_b), l2_norm(gauss_b),
                             h=h, time=state.t))
    return report
