"""Command-line front end.

Subcommands: simulate, check-invariance, identities, two-charge, kernels.
Every run writes its artifacts plus a manifest.json holding the effective
configuration, seed, package versions, and wall time, sufficient to
regenerate the outputs.  Flags can be pre-set through environment
variables with the EMLAB_ prefix (EMLAB_OUT, EMLAB_SEED, EMLAB_UNITS,
EMLAB_THREADS).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .constants import PhysicalConstants
from .errors import EmlabError
from .classical import classical_gauss_residual, classical_rhs
from .frames import (FrameBoost, invariance_residual_modified,
                     noninvariance_residual_classical)
from .identities import identity_report_csv, run_identity_report
from .kernels import (PointCharge, biot_savart_B, coulomb_E, invariant_combo,
                      motion_E2, total_E_moving)
from .modified import modified_gauss_residual, modified_rhs
from .reporting import ResidualReport
from .scenario import (build_initial_state, load_scenario, read_trajectory,
                       run_manifest, write_trajectory)
from .solver import run_trajectory
from .twocharge import TwoChargeScenario, force_relativistic_comparison, summarize

KERNELS_CSV_HEADER = (
    "x,y,z,"
    "coulomb_x,coulomb_y,coulomb_z,"
    "biot_savart_x,biot_savart_y,biot_savart_z,"
    "motion_x,motion_y,motion_z,"
    "total_x,total_y,total_z,"
    "combo_x,combo_y,combo_z"
)


def _env_default(name: str, fallback):
    return os.environ.get(f"EMLAB_{name}", fallback)


def _parse_vec3(text: str, flag: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise EmlabError(f"{flag} expects 'x,y,z', got {text!r}")
    try:
        return np.asarray([float(p) for p in parts])
    except ValueError:
        raise EmlabError(f"{flag} expects numeric components, got {text!r}") from None


def _constants(units: str) -> PhysicalConstants:
    return PhysicalConstants.normalized() if units == "normalized" else PhysicalConstants.si()


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=_env_default("OUT", "emlab-out"),
                        help="output directory (default: emlab-out)")
    parser.add_argument("--seed", type=int, default=int(_env_default("SEED", "0")),
                        help="seed recorded in the manifest and used by sampling")
    parser.add_argument("--units", choices=("si", "normalized"),
                        default=_env_default("UNITS", "si"),
                        help="unit system for direct-parameter subcommands")
    parser.add_argument("--threads", type=int, default=int(_env_default("THREADS", "1")),
                        help="advisory thread count, recorded in the manifest "
                             "(grid operators are single-threaded and "
                             "deterministic at any setting)")


def _finish(out_dir: Path, args, command: str, started: float, config: dict,
            extra: dict | None = None) -> None:
    manifest = run_manifest(config, seed=args.seed,
                            wall_time_s=time.perf_counter() - started,
                            command=command, extra=extra)
    manifest["threads"] = args.threads
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    state, sources = build_initial_state(scenario)
    rhs = modified_rhs if scenario.system == "modified" else classical_rhs
    derive = None
    if scenario.ubar_mode == "derived":
        from .modified import mean_velocity_from_state

        def derive(s):
            return mean_velocity_from_state(s, rho_floor=scenario.rho_floor,
                                            fallback=sources.fallback_ubar)

    traj = run_trajectory(state, rhs, scenario.solver, sources,
                          record_every=scenario.snapshot_every, derive_ubar=derive)
    write_trajectory(traj, out_dir / "trajectory", units=scenario.units,
                     fmt=scenario.output_format)

    residual_fn = (modified_gauss_residual if scenario.system == "modified"
                   else classical_gauss_residual)
    report = ResidualReport()
    for s in traj.states:
        for entry in residual_fn(s, scenario.constants).entries:
            report.add(entry)
    (out_dir / "gauss_residuals.csv").write_text(report.to_csv())
    (out_dir / "effective_config.json").write_text(scenario.to_json())

    _finish(out_dir, args, "simulate", started, scenario.effective_config(),
            extra={"snapshots": len(traj.states)})
    print(f"wrote {len(traj.states)} snapshots to {out_dir/'trajectory'}")
    return 0


def cmd_check_invariance(args) -> int:
    started = time.perf_counter()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    boost = FrameBoost(tuple(_parse_vec3(args.v0, "--v0")))
    traj = read_trajectory(args.trajectory)
    indices = None
    if args.indices:
        indices = [int(i) for i in args.indices.split(",")]

    report = ResidualReport()
    if args.system in ("modified", "both"):
        for entry in invariance_residual_modified(traj, boost, indices=indices).entries:
            report.add(entry)
    if args.system in ("classical", "both"):
        for entry in noninvariance_residual_classical(traj, boost, indices=indices).entries:
            report.add(entry)
    (out_dir / "invariance_residuals.csv").write_text(report.to_csv())

    config = {"trajectory": str(args.trajectory), "v0": list(boost.v0),
              "system": args.system, "indices": indices}
    _finish(out_dir, args, "check-invariance", started, config)
    print((out_dir / "invariance_residuals.csv").read_text(), end="")
    return 0


def cmd_identities(args) -> int:
    started = time.perf_counter()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ns = tuple(int(n) for n in args.levels.split(","))
    rows = run_identity_report(seed=args.seed, ns=ns, degree=args.degree)
    (out_dir / "identities.csv").write_text(identity_report_csv(rows))

    config = {"seed": args.seed, "levels": list(ns), "degree": args.degree}
    _finish(out_dir, args, "identities", started, config)
    print((out_dir / "identities.csv").read_text(), end="")
    return 0


def cmd_two_charge(args) -> int:
    started = time.perf_counter()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = TwoChargeScenario(
        q1=args.q1, q2=args.q2,
        position_1=_parse_vec3(args.pos1, "--pos1"),
        position_2=_parse_vec3(args.pos2, "--pos2"),
        u=_parse_vec3(args.u, "--u"),
        constants=_constants(args.units),
    )
    comparison = force_relativistic_comparison(scenario)
    (out_dir / "two_charge_forces.csv").write_text(comparison.to_csv())

    config = {"q1": args.q1, "q2": args.q2, "pos1": args.pos1, "pos2": args.pos2,
              "u": args.u, "units": args.units}
    _finish(out_dir, args, "two-charge", started, config)
    print(summarize(comparison))
    return 0


def cmd_kernels(args) -> int:
    started = time.perf_counter()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    pc = PointCharge(q=args.q, position=_parse_vec3(args.pos, "--pos"),
                     velocity=_parse_vec3(args.vel, "--vel"),
                     constants=_constants(args.units))
    if args.points:
        points = [_parse_vec3(p, "--points") for p in args.points.split(";") if p]
    else:
        rng = np.random.default_rng(args.seed)
        directions = rng.normal(size=(args.samples, 3))
        directions /= np.linalg.norm(directions, axis=1)[:, None]
        radii = rng.uniform(0.5 * args.radius, args.radius, size=args.samples)
        points = [pc.position + r * d for r, d in zip(radii, directions)]

    lines = [KERNELS_CSV_HEADER]
    for point in points:
        row = list(point)
        for fn in (coulomb_E, biot_savart_B, motion_E2, total_E_moving, invariant_combo):
            row.extend(fn(pc, point))
        lines.append(",".join(repr(float(x)) for x in row))
    (out_dir / "kernels.csv").write_text("\n".join(lines) + "\n")

    config = {"q": args.q, "pos": args.pos, "vel": args.vel, "units": args.units,
              "points": args.points, "samples": args.samples, "radius": args.radius}
    _finish(out_dir, args, "kernels", started, config)
    print(f"wrote {len(points)} kernel samples to {out_dir/'kernels.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emlab",
        description="Field-equation laboratory: solvers, kernels, frame checks.",
    )
    parser.add_argument("--version", action="version", version=f"emlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario and dump its trajectory")
    p.add_argument("--scenario", required=True, help="path to a scenario JSON file")
    _add_common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("check-invariance",
                       help="evaluate boosted-frame residuals on a stored trajectory")
    p.add_argument("--trajectory", required=True, help="trajectory directory")
    p.add_argument("--v0", required=True, help="boost velocity 'vx,vy,vz'")
    p.add_argument("--system", choices=("modified", "classical", "both"),
                   default="both", help="which equation set to evaluate")
    p.add_argument("--indices", default=None,
                   help="comma-separated interior snapshot indices (default: all)")
    _add_common(p)
    p.set_defaults(fn=cmd_check_invariance)

    p = sub.add_parser("identities", help="verify the six vector-calculus formulas")
    p.add_argument("--levels", default="16,32,64",
                   help="comma-separated grid sizes for the refinement table")
    p.add_argument("--degree", type=int, default=3, help="max trig degree of test fields")
    _add_common(p)
    p.set_defaults(fn=cmd_identities)

    p = sub.add_parser("two-charge", help="compare force predictions for a charge pair")
    p.add_argument("--q1", type=float, default=1.0)
    p.add_argument("--q2", type=float, default=1.0)
    p.add_argument("--pos1", default="0,0,0", help="position of charge 1 'x,y,z'")
    p.add_argument("--pos2", default="1,0,0", help="position of charge 2 'x,y,z'")
    p.add_argument("--u", default="0,0,0", help="observer velocity 'x,y,z'")
    _add_common(p)
    p.set_defaults(fn=cmd_two_charge)

    p = sub.add_parser("kernels", help="evaluate point-charge kernels at sample points")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--pos", default="0,0,0", help="charge position 'x,y,z'")
    p.add_argument("--vel", default="0,0,0", help="charge velocity 'x,y,z'")
    p.add_argument("--points", default=None,
                   help="semicolon-separated evaluation points 'x,y,z;x,y,z'")
    p.add_argument("--samples", type=int, default=16,
                   help="number of random evaluation points when --points is unset")
    p.add_argument("--radius", type=float, default=2.0,
                   help="max radius of random evaluation points")
    _add_common(p)
    p.set_defaults(fn=cmd_kernels)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (EmlabError, OSError, ValueError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        out = getattr(args, "out", None)
        if out:
            try:
                Path(out).mkdir(parents=True, exist_ok=True)
                (Path(out) / "error.json").write_text(json.dumps(record, indent=2) + "\n")
            except OSError:
                pass
        print(json.dumps(record), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
