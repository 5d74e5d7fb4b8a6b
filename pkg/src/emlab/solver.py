"""Dynamical state and the shared RK4 stepping machinery.

Both field systems advance (E, B, rho) with the same classic RK4 code
path; the current density is prescribed data sampled at stage times, and
the mean current velocity is either prescribed in time or re-derived from
the state between steps.  Using one stepper for both systems keeps their
zero-mean-velocity outputs bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constants import PhysicalConstants
from .errors import BlowupError, StabilityError
from .grid import GridSpec, ScalarField, VectorField, require_same_grid

Vec3 = np.ndarray
RHS = Callable[["EMState", PhysicalConstants], tuple[np.ndarray, np.ndarray, np.ndarray]]

CFL_LIMIT = 0.5  # dt*c/h guard for RK4 on central differences


def _vec3(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    return arr


@dataclass
class EMState:
    """Full dynamical state at one instant.

    ubar and ubar_dot are the global mean current velocity and its time
    derivative; the classical system ignores them.
    """

    t: float
    E: VectorField
    B: VectorField
    rho: ScalarField
    J: VectorField
    ubar: Vec3 = field(default_factory=lambda: np.zeros(3))
    ubar_dot: Vec3 = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        require_same_grid(self.E, self.B, self.rho, self.J)
        self.ubar = _vec3(self.ubar)
        self.ubar_dot = _vec3(self.ubar_dot)

    @property
    def grid(self) -> GridSpec:
        return self.E.grid

    @classmethod
    def zeros(cls, grid: GridSpec, t: float = 0.0) -> "EMState":
        return cls(
            t=t,
            E=VectorField.zeros(grid),
            B=VectorField.zeros(grid),
            rho=ScalarField.zeros(grid),
            J=VectorField.zeros(grid),
        )

    def copy(self) -> "EMState":
        return EMState(
            t=self.t, E=self.E.copy(), B=self.B.copy(), rho=self.rho.copy(),
            J=self.J.copy(), ubar=self.ubar.copy(), ubar_dot=self.ubar_dot.copy(),
        )


@dataclass
class SolverConfig:
    """Time-stepping configuration.

    dt defaults to cfl*h/c; an explicit dt must still satisfy the
    dt*c/h <= 0.5 stability guard.
    """

    steps: int
    constants: PhysicalConstants
    dt: float | None = None
    cfl: float = 0.4

    def resolve_dt(self, grid: GridSpec) -> float:
        dt = self.dt if self.dt is not None else self.cfl * grid.h / self.constants.c
        courant = dt * self.constants.c / grid.h
        if not courant <= CFL_LIMIT:
            raise StabilityError(
                f"dt*c/h = {courant:g} exceeds the stability guard {CFL_LIMIT}"
                f" (dt={dt:g}, h={grid.h:g}, c={self.constants.c:g})"
            )
        return dt


@dataclass
class SourceModel:
    """Prescribed source data sampled during stepping.

    current(t) returns the current-density values at time t (None holds the
    state's J fixed).  In "prescribed" mode ubar(t)/ubar_dot(t) closures
    supply the mean velocity; in "derived" mode the run loop re-derives it
    from the state after every step and differentiates it across steps.
    """

    current: Callable[[float], np.ndarray] | None = None
    ubar: Callable[[float], Vec3] | None = None
    ubar_dot: Callable[[float], Vec3] | None = None
    ubar_mode: str = "prescribed"
    rho_floor: float | None = None
    fallback_ubar: Vec3 = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.ubar_mode not in ("prescribed", "derived"):
            raise ValueError(f"unknown ubar mode {self.ubar_mode!r}")
        self.fallback_ubar = _vec3(self.fallback_ubar)

    def sample_current(self, t: float, state: EMState) -> np.ndarray:
        if self.current is None:
            return state.J.values
        return np.asarray(self.current(t), dtype=np.float64)

    def sample_ubar(self, t: float, state: EMState) -> tuple[Vec3, Vec3]:
        ubar = _vec3(self.ubar(t)) if self.ubar is not None else state.ubar
        ubar_dot = _vec3(self.ubar_dot(t)) if self.ubar_dot is not None else state.ubar_dot
        return ubar, ubar_dot


STATIC_SOURCES = SourceModel()


def rk4_step(state: EMState, rhs: RHS, dt: float, constants: PhysicalConstants,
             sources: SourceModel = STATIC_SOURCES) -> EMState:
    """One classic RK4 step of (E, B, rho); J and ubar resampled per stage."""
    grid = state.grid

    def stage(t, e_vals, b_vals, rho_vals):
        ubar, ubar_dot = sources.sample_ubar(t, state)
        st = EMState(
            t=t,
            E=VectorField(grid, e_vals),
            B=VectorField(grid, b_vals),
            rho=ScalarField(grid, rho_vals),
            J=VectorField(grid, sources.sample_current(t, state)),
            ubar=ubar,
            ubar_dot=ubar_dot,
        )
        return rhs(st, constants)

    t0 = state.t
    e0, b0, r0 = state.E.values, state.B.values, state.rho.values
    k1e, k1b, k1r = stage(t0, e0, b0, r0)
    k2e, k2b, k2r = stage(t0 + 0.5 * dt, e0 + 0.5 * dt * k1e, b0 + 0.5 * dt * k1b,
                          r0 + 0.5 * dt * k1r)
    k3e, k3b, k3r = stage(t0 + 0.5 * dt, e0 + 0.5 * dt * k2e, b0 + 0.5 * dt * k2b,
                          r0 + 0.5 * dt * k2r)
    k4e, k4b, k4r = stage(t0 + dt, e0 + dt * k3e, b0 + dt * k3b, r0 + dt * k3r)

    sixth = dt / 6.0
    t1 = t0 + dt
    ubar1, ubar_dot1 = sources.sample_ubar(t1, state)
    return EMState(
        t=t1,
        E=VectorField(grid, e0 + sixth * (k1e + 2.0 * k2e + 2.0 * k3e + k4e)),
        B=VectorField(grid, b0 + sixth * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)),
        rho=ScalarField(grid, r0 + sixth * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)),
        J=VectorField(grid, sources.sample_current(t1, state)),
        ubar=ubar1,
        ubar_dot=ubar_dot1,
    )


def field_energy(state: EMState, constants: PhysicalConstants) -> float:
    """Box-integrated field energy (eps0 E^2 + B^2/mu0)/2."""
    e2 = np.sum(state.E.values**2, axis=-1)
    b2 = np.sum(state.B.values**2, axis=-1)
    dens = 0.5 * (constants.eps0 * e2 + b2 / constants.mu0)
    return float(state.grid.cell_volume * np.sum(dens))


@dataclass
class Trajectory:
    """Recorded snapshots at uniform spacing snapshot_dt = record_every*dt."""

    states: list[EMState]
    snapshot_dt: float
    constants: PhysicalConstants

    def __len__(self) -> int:
        return len(self.states)

    @property
    def grid(self) -> GridSpec:
        return self.states[0].grid

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])


def run_trajectory(
    state: EMState,
    rhs: RHS,
    cfg: SolverConfig,
    sources: SourceModel = STATIC_SOURCES,
    record_every: int = 1,
    derive_ubar: Callable[[EMState], Vec3] | None = None,
    energy_guard: float = 1e6,
) -> Trajectory:
    """Advance `cfg.steps` steps, recording every `record_every`-th state.

    In derived-ubar mode the caller passes `derive_ubar`; ubar_dot is then a
    centered difference of the derived values across steps (one-sided at the
    first step).  The energy guard raises BlowupError when the field energy
    grows past energy_guard times its initial value, or goes non-finite.
    """
    if cfg.steps % record_every != 0:
        raise ValueError(
            f"record cadence {record_every} does not divide step count {cfg.steps}"
        )
    dt = cfg.resolve_dt(state.grid)
    state = state.copy()
    if derive_ubar is not None:
        state.ubar = derive_ubar(state)

    e0 = field_energy(state, cfg.constants)
    floor = e0
    states = [state.copy()]
    ubar_history = [state.ubar.copy()]

    for step in range(1, cfg.steps + 1):
        state = rk4_step(state, rhs, dt, cfg.constants, sources)
        if derive_ubar is not None:
            state.ubar = derive_ubar(state)
            ubar_history.append(state.ubar.copy())
            if len(ubar_history) >= 3:
                state.ubar_dot = (ubar_history[-1] - ubar_history[-3]) / (2.0 * dt)
            else:
                state.ubar_dot = (ubar_history[-1] - ubar_history[-2]) / dt
        energy = field_energy(state, cfg.constants)
        if not np.isfinite(energy):
            raise BlowupError(f"non-finite field energy at step {step}")
        if floor == 0.0:
            floor = energy
        elif energy > energy_guard * floor:
            raise BlowupError(
                f"field energy {energy:g} at step {step} exceeds guard"
                f" ({energy_guard:g} x baseline {floor:g})"
            )
        if step % record_every == 0:
            states.append(state.copy())

    return Trajectory(states=states, snapshot_dt=record_every * dt, constants=cfg.constants)
