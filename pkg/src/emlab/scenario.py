"""Scenario configuration: parsing, validation, source catalog, run manifest.

Scenarios are JSON documents.  Only `system` and `grid` are required;
every omitted key takes a documented default, and the effective (fully
defaulted) configuration is echoed into the run manifest.  Schema errors
carry the dotted path of the offending key.

Source catalog:
  plane-wave     transverse wave, source-free       (params: k, amplitude,
                 polarization, phase)
  gaussian-cloud periodic charge bump drifting at a constant velocity, with
                 a neutralizing background and a consistent electrostatic
                 initial field                      (params: center,
                 concentration, amplitude, velocity, field_init)
  uniform-drift  constant current density, zero net charge
                                                    (params: current, ubar)
"""

from __future__ import annotations

import json
import math
import platform
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .constants import PhysicalConstants
from .errors import SchemaError, StabilityError
from .grid import GridSpec, ScalarField, VectorField, read_field, write_field
from .operators import electrostatic_field_from_density
from .solver import EMState, SolverConfig, SourceModel, Trajectory

SOURCE_KINDS = ("plane-wave", "gaussian-cloud", "uniform-drift")

DEFAULTS = {
    "units": "si",
    "seed": 0,
    "grid": {"n": 32, "length": 2.0 * math.pi, "origin": [0.0, 0.0, 0.0]},
    "solver": {"cfl": 0.4, "dt": None, "steps": 100},
    "sources": {
        "kind": "plane-wave",
        "params": {},
        "ubar_mode": "prescribed",
        "ubar": [0.0, 0.0, 0.0],
        "ubar_dot": [0.0, 0.0, 0.0],
        "rho_floor": None,
    },
    "output": {"snapshot_every": 10, "format": "csv"},
}

CATALOG_DEFAULTS = {
    "plane-wave": {
        "k": [1, 0, 0],
        "amplitude": 1.0,
        "polarization": [0.0, 1.0, 0.0],
        "phase": 0.0,
    },
    "gaussian-cloud": {
        "center": [math.pi, math.pi, math.pi],
        "concentration": 4.0,
        "amplitude": 1.0,
        "velocity": [0.0, 0.0, 0.0],
        "field_init": "central",
    },
    "uniform-drift": {
        "current": [1.0, 0.0, 0.0],
        "ubar": [0.0, 0.0, 0.0],
    },
}


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(path, message)


def _check_keys(obj: dict, allowed, path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}" if path else key, "unknown key")


def _vec3(value, path: str) -> list[float]:
    _require(isinstance(value, (list, tuple)) and len(value) == 3, path,
             f"expected a 3-vector, got {value!r}")
    try:
        return [float(x) for x in value]
    except (TypeError, ValueError):
        raise SchemaError(path, f"expected numeric components, got {value!r}") from None


@dataclass
class Scenario:
    system: str
    units: str
    seed: int
    grid: GridSpec
    solver: SolverConfig
    source_kind: str
    source_params: dict
    ubar_mode: str
    ubar: list[float]
    ubar_dot: list[float]
    rho_floor: float | None
    snapshot_every: int
    output_format: str

    @property
    def constants(self) -> PhysicalConstants:
        return self.solver.constants

    def effective_config(self) -> dict:
        return {
            "system": self.system,
            "units": self.units,
            "seed": self.seed,
            "grid": {
                "dims": list(self.grid.dims),
                "spacing": self.grid.h,
                "origin": list(self.grid.origin),
            },
            "solver": {"cfl": self.solver.cfl, "dt": self.solver.dt,
                       "steps": self.solver.steps},
            "sources": {
                "kind": self.source_kind,
                "params": self.source_params,
                "ubar_mode": self.ubar_mode,
                "ubar": self.ubar,
                "ubar_dot": self.ubar_dot,
                "rho_floor": self.rho_floor,
            },
            "output": {"snapshot_every": self.snapshot_every,
                       "format": self.output_format},
        }

    def to_json(self) -> str:
        return json.dumps(self.effective_config(), indent=2, sort_keys=True) + "\n"


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document, applying all defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("<document>", f"not valid JSON: {exc}") from None
    _require(isinstance(raw, dict), "<document>", "top level must be an object")
    _check_keys(raw, ("system", "units", "seed", "grid", "solver", "sources", "output"), "")

    _require("system" in raw, "system", "required key missing")
    system = raw["system"]
    _require(system in ("classical", "modified"), "system",
             f"must be 'classical' or 'modified', got {system!r}")
    units = raw.get("units", DEFAULTS["units"])
    _require(units in ("si", "normalized"), "units",
             f"must be 'si' or 'normalized', got {units!r}")
    constants = PhysicalConstants.si() if units == "si" else PhysicalConstants.normalized()
    seed = raw.get("seed", DEFAULTS["seed"])
    _require(isinstance(seed, int) and seed >= 0, "seed", "must be a nonnegative integer")

    _require("grid" in raw, "grid", "required key missing")
    grid_raw = dict(raw["grid"]) if isinstance(raw["grid"], dict) else None
    _require(grid_raw is not None, "grid", "must be an object")
    _check_keys(grid_raw, ("n", "length", "dims", "spacing", "origin"), "grid")
    origin = _vec3(grid_raw.get("origin", DEFAULTS["grid"]["origin"]), "grid.origin")
    try:
        if "dims" in grid_raw or "spacing" in grid_raw:
            _require("dims" in grid_raw and "spacing" in grid_raw, "grid",
                     "dims and spacing must be given together")
            dims = grid_raw["dims"]
            _require(isinstance(dims, (list, tuple)) and len(dims) == 3, "grid.dims",
                     "expected 3 integers")
            grid = GridSpec(dims=tuple(int(n) for n in dims),
                            h=float(grid_raw["spacing"]), origin=tuple(origin))
        else:
            n = int(grid_raw.get("n", DEFAULTS["grid"]["n"]))
            length = float(grid_raw.get("length", DEFAULTS["grid"]["length"]))
            grid = GridSpec.cube(n, length=length, origin=tuple(origin))
    except ValueError as exc:
        raise SchemaError("grid", str(exc)) from None

    solver_raw = dict(raw.get("solver", {}))
    _check_keys(solver_raw, ("cfl", "dt", "steps"), "solver")
    steps = solver_raw.get("steps", DEFAULTS["solver"]["steps"])
    _require(isinstance(steps, int) and steps > 0, "solver.steps",
             "must be a positive integer")
    dt = solver_raw.get("dt", DEFAULTS["solver"]["dt"])
    _require(dt is None or float(dt) > 0.0, "solver.dt", "must be positive when set")
    cfg = SolverConfig(steps=steps, constants=constants,
                       dt=None if dt is None else float(dt),
                       cfl=float(solver_raw.get("cfl", DEFAULTS["solver"]["cfl"])))
    try:
        cfg.resolve_dt(grid)
    except StabilityError as exc:
        raise SchemaError("solver.dt", str(exc)) from None

    sources_raw = dict(raw.get("sources", {}))
    _check_keys(sources_raw, ("kind", "params", "ubar_mode", "ubar", "ubar_dot",
                              "rho_floor"), "sources")
    kind = sources_raw.get("kind", DEFAULTS["sources"]["kind"])
    _require(kind in SOURCE_KINDS, "sources.kind",
             f"unknown catalog entry {kind!r}; choose from {SOURCE_KINDS}")
    params = dict(CATALOG_DEFAULTS[kind])
    user_params = sources_raw.get("params", {})
    _require(isinstance(user_params, dict), "sources.params", "must be an object")
    _check_keys(user_params, tuple(params), "sources.params")
    params.update(user_params)
    _validate_catalog_params(kind, params, constants)
    ubar_mode = sources_raw.get("ubar_mode", DEFAULTS["sources"]["ubar_mode"])
    _require(ubar_mode in ("prescribed", "derived"), "sources.ubar_mode",
             f"must be 'prescribed' or 'derived', got {ubar_mode!r}")
    default_ubar = params["velocity"] if kind == "gaussian-cloud" else (
        params["ubar"] if kind == "uniform-drift" else DEFAULTS["sources"]["ubar"])
    ubar = _vec3(sources_raw.get("ubar", default_ubar), "sources.ubar")
    ubar_dot = _vec3(sources_raw.get("ubar_dot", DEFAULTS["sources"]["ubar_dot"]),
                     "sources.ubar_dot")
    rho_floor = sources_raw.get("rho_floor", DEFAULTS["sources"]["rho_floor"])
    _require(rho_floor is None or float(rho_floor) >= 0.0, "sources.rho_floor",
             "must be nonnegative when set")

    output_raw = dict(raw.get("output", {}))
    _check_keys(output_raw, ("snapshot_every", "format"), "output")
    snapshot_every = output_raw.get("snapshot_every", DEFAULTS["output"]["snapshot_every"])
    _require(isinstance(snapshot_every, int) and snapshot_every > 0,
             "output.snapshot_every", "must be a positive integer")
    _require(steps % snapshot_every == 0, "output.snapshot_every",
             f"must divide solver.steps ({steps})")
    fmt = output_raw.get("format", DEFAULTS["output"]["format"])
    _require(fmt in ("csv", "npz"), "output.format", f"must be 'csv' or 'npz', got {fmt!r}")

    return Scenario(
        system=system, units=units, seed=seed, grid=grid, solver=cfg,
        source_kind=kind, source_params=params, ubar_mode=ubar_mode, ubar=ubar,
        ubar_dot=ubar_dot,
        rho_floor=None if rho_floor is None else float(rho_floor),
        snapshot_every=snapshot_every, output_format=fmt,
    )


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def _validate_catalog_params(kind: str, params: dict, constants: PhysicalConstants) -> None:
    path = "sources.params"
    if kind == "plane-wave":
        k = params["k"]
        _require(isinstance(k, (list, tuple)) and len(k) == 3
                 and all(float(x) == int(x) for x in k), f"{path}.k",
                 "wavenumbers must be integers (periodic box)")
        _require(any(int(x) != 0 for x in k), f"{path}.k", "wave vector must be nonzero")
        pol = _vec3(params["polarization"], f"{path}.polarization")
        kv = np.asarray([float(x) for x in k])
        pv = np.asarray(pol) - (np.asarray(pol) @ kv) * kv / float(kv @ kv)
        _require(float(np.linalg.norm(pv)) > 1e-12, f"{path}.polarization",
                 "polarization must have a component transverse to k")
    elif kind == "gaussian-cloud":
        _vec3(params["center"], f"{path}.center")
        _require(float(params["concentration"]) > 0.0, f"{path}.concentration",
                 "must be positive")
        vel = _vec3(params["velocity"], f"{path}.velocity")
        speed = float(np.linalg.norm(vel))
        beta = speed / constants.c
        _require(beta < 1.0, f"{path}.velocity",
                 f"cloud speed {speed:g} gives beta={beta:g}; sub-light motion required")
        _require(params["field_init"] in ("central", "spectral"), f"{path}.field_init",
                 "must be 'central' or 'spectral'")
    elif kind == "uniform-drift":
        _vec3(params["current"], f"{path}.current")
        _vec3(params["ubar"], f"{path}.ubar")


# ---------------------------------------------------------------------------
# Catalog builders: initial state plus prescribed-source closures.
# ---------------------------------------------------------------------------

def _plane_wave_state(scenario: Scenario):
    p = scenario.source_params
    grid, c = scenario.grid, scenario.constants
    kv = np.asarray([float(x) for x in p["k"]])
    pol = np.asarray(_vec3(p["polarization"], "sources.params.polarization"))
    pol = pol - (pol @ kv) * kv / float(kv @ kv)
    pol = pol / float(np.linalg.norm(pol))
    amp = float(p["amplitude"])
    phase = float(p["phase"])
    khat = kv / float(np.linalg.norm(kv))
    bpol = np.cross(khat, pol) / c.c

    X, Y, Z = grid.meshgrid()
    theta = kv[0] * X + kv[1] * Y + kv[2] * Z + phase
    cos_t = np.cos(theta)
    E = VectorField(grid, cos_t[..., None] * (amp * pol))
    B = VectorField(grid, cos_t[..., None] * (amp * bpol))
    state = EMState(t=0.0, E=E, B=B, rho=ScalarField.zeros(grid),
                    J=VectorField.zeros(grid))
    return state, None  # no prescribed current


def _periodic_bump(grid: GridSpec, center, kappa: float, amplitude: float,
                   offset=np.zeros(3)) -> np.ndarray:
    """Smooth periodic bump with its box mean removed (zero net charge)."""
    X, Y, Z = grid.meshgrid()
    cx, cy, cz = center
    ox, oy, oz = offset
    arg = (np.cos(X - ox - cx) + np.cos(Y - oy - cy) + np.cos(Z - oz - cz) - 3.0)
    bump = amplitude * np.exp(kappa * arg)
    return bump - float(np.mean(bump))


def _gaussian_cloud_state(scenario: Scenario):
    p = scenario.source_params
    grid = scenario.grid
    center = [float(x) for x in p["center"]]
    kappa = float(p["concentration"])
    amp = float(p["amplitude"])
    u0 = np.asarray([float(x) for x in p["velocity"]])

    rho0 = ScalarField(grid, _periodic_bump(grid, center, kappa, amp))
    E0 = electrostatic_field_from_density(rho0, scenario.constants.eps0,
                                          symbol=p["field_init"])
    J0 = VectorField(grid, rho0.values[..., None] * u0)
    state = EMState(t=0.0, E=E0, B=VectorField.zeros(grid), rho=rho0, J=J0,
                    ubar=u0.copy())

    def current(t: float) -> np.ndarray:
        # exact drifting bump, sampled in closed form
        rho_t = _periodic_bump(grid, center, kappa, amp, offset=u0 * t)
        return rho_t[..., None] * u0

    return state, current


def _uniform_drift_state(scenario: Scenario):
    p = scenario.source_params
    grid = scenario.grid
    j0 = np.asarray(_vec3(p["current"], "sources.params.current"))
    state = EMState(t=0.0, E=VectorField.zeros(grid), B=VectorField.zeros(grid),
                    rho=ScalarField.zeros(grid),
                    J=VectorField.constant(grid, j0),
                    ubar=np.asarray(_vec3(p["ubar"], "sources.params.ubar")))
    return state, None


_BUILDERS = {
    "plane-wave": _plane_wave_state,
    "gaussian-cloud": _gaussian_cloud_state,
    "uniform-drift": _uniform_drift_state,
}


def build_initial_state(scenario: Scenario) -> tuple[EMState, SourceModel]:
    """Initial state and source model for a parsed scenario."""
    state, current = _BUILDERS[scenario.source_kind](scenario)
    ubar0 = np.asarray(scenario.ubar)
    ubar_dot0 = np.asarray(scenario.ubar_dot)
    state.ubar = ubar0.copy()
    state.ubar_dot = ubar_dot0.copy()
    if scenario.ubar_mode == "prescribed":
        sources = SourceModel(
            current=current,
            ubar=lambda t: ubar0,
            ubar_dot=lambda t: ubar_dot0,
            ubar_mode="prescribed",
        )
    else:
        sources = SourceModel(
            current=current,
            ubar_mode="derived",
            rho_floor=scenario.rho_floor,
            fallback_ubar=ubar0,
        )
    return state, sources


# ---------------------------------------------------------------------------
# Trajectory directories and run manifests.
# ---------------------------------------------------------------------------

TRAJECTORY_META = "trajectory.json"
STATE_FIELDS = ("E", "B", "rho", "J")


def write_state_dir(state: EMState, directory, fmt: str = "csv") -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ext = "csv" if fmt == "csv" else "npz"
    for name in STATE_FIELDS:
        write_field(getattr(state, name), directory / f"{name}.{ext}", fmt=fmt)
    meta = {"t": state.t, "ubar": list(state.ubar), "ubar_dot": list(state.ubar_dot)}
    (directory / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def read_state_dir(directory) -> EMState:
    directory = Path(directory)
    meta = json.loads((directory / "meta.json").read_text())
    fields = {}
    for name in STATE_FIELDS:
        for ext in ("csv", "npz"):
            path = directory / f"{name}.{ext}"
            if path.exists():
                fields[name] = read_field(path)
                break
        else:
            raise FileNotFoundError(f"missing field dump {name} in {directory}")
    return EMState(t=float(meta["t"]), E=fields["E"], B=fields["B"],
                   rho=fields["rho"], J=fields["J"],
                   ubar=np.asarray(meta["ubar"]), ubar_dot=np.asarray(meta["ubar_dot"]))


def write_trajectory(traj: Trajectory, directory, units: str, fmt: str = "csv") -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, state in enumerate(traj.states):
        write_state_dir(state, directory / f"step_{i:06d}", fmt=fmt)
    meta = {
        "snapshot_dt": traj.snapshot_dt,
        "n_snapshots": len(traj.states),
        "units": units,
        "constants": {"eps0": traj.constants.eps0, "mu0": traj.constants.mu0},
    }
    (directory / TRAJECTORY_META).write_text(json.dumps(meta, indent=2) + "\n")


def read_trajectory(directory) -> Trajectory:
    directory = Path(directory)
    meta = json.loads((directory / TRAJECTORY_META).read_text())
    constants = PhysicalConstants(**meta["constants"])
    states = [
        read_state_dir(directory / f"step_{i:06d}")
        for i in range(int(meta["n_snapshots"]))
    ]
    return Trajectory(states=states, snapshot_dt=float(meta["snapshot_dt"]),
                      constants=constants)


def run_manifest(effective_config: dict, seed: int, wall_time_s: float,
                 command: str, extra: dict | None = None) -> dict:
    manifest = {
        "command": command,
        "effective_config": effective_config,
        "seed": seed,
        "versions": {
            "emlab": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "wall_time_s": wall_time_s,
        "generated_at_unix": time.time(),
    }
    if extra:
        manifest.update(extra)
    return manifest
