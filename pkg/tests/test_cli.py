import json
from pathlib import Path

import numpy as np
import pytest

from emlab.cli import build_parser, main

# golden header lines, frozen from the first verified build; changing any
# CSV layout must consciously update these literals
RESIDUAL_CSV_HEADER = "equation,max_norm,l2_norm,h,dt,time,v0x,v0y,v0z"
IDENTITY_CSV_HEADER = "identity,kind,h,deviation,order_estimate"
FORCE_TABLE_CSV_HEADER = "prediction,fx,fy,fz,ratio_to_rest"
KERNELS_CSV_HEADER = (
    "x,y,z,"
    "coulomb_x,coulomb_y,coulomb_z,"
    "biot_savart_x,biot_savart_y,biot_savart_z,"
    "motion_x,motion_y,motion_z,"
    "total_x,total_y,total_z,"
    "combo_x,combo_y,combo_z"
)

WAVE_SCENARIO = {
    "system": "modified",
    "units": "normalized",
    "grid": {"n": 8},
    "solver": {"steps": 8, "dt": (2 * np.pi / 8) / 2.4},
    "sources": {"kind": "plane-wave",
                "params": {"k": [1, 2, 0], "polarization": [2.0, -1.0, 2.23606797749979]}},
    "output": {"snapshot_every": 2},
}

ZERO_SCENARIO = {
    "system": "classical",
    "units": "normalized",
    "grid": {"n": 8},
    "solver": {"steps": 4},
    "sources": {"kind": "plane-wave", "params": {"amplitude": 0.0}},
    "output": {"snapshot_every": 2},
}


def write_scenario(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def first_line(path):
    return Path(path).read_text().splitlines()[0]


# ---------------------------------------------------------------------------
# help and parsing
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("cmd,flags", [
    ("simulate", ["--scenario", "--out", "--seed", "--units", "--threads"]),
    ("check-invariance", ["--trajectory", "--v0", "--system", "--indices"]),
    ("identities", ["--levels", "--degree", "--seed"]),
    ("two-charge", ["--q1", "--q2", "--pos1", "--pos2", "--u"]),
    ("kernels", ["--q", "--pos", "--vel", "--points", "--samples", "--radius"]),
])
def test_help_lists_flags(capsys, cmd, flags):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args([cmd, "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    for flag in flags:
        assert flag in text


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["--version"])
    assert exc.value.code == 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_zero_scenario_all_zero_snapshots(tmp_path):
    scenario = write_scenario(tmp_path, ZERO_SCENARIO)
    out = tmp_path / "out"
    assert main(["simulate", "--scenario", scenario, "--out", str(out)]) == 0
    from emlab.scenario import read_trajectory
    traj = read_trajectory(out / "trajectory")
    assert len(traj) == 3
    for state in traj.states:
        np.testing.assert_array_equal(state.E.values, 0.0)
        np.testing.assert_array_equal(state.B.values, 0.0)
    assert first_line(out / "gauss_residuals.csv") == RESIDUAL_CSV_HEADER
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert manifest["effective_config"]["system"] == "classical"


def test_simulate_rejects_bad_scenario_with_error_record(tmp_path):
    bad = dict(ZERO_SCENARIO)
    bad["solver"] = {"dt": 99.0}
    scenario = write_scenario(tmp_path, bad)
    out = tmp_path / "out"
    code = main(["simulate", "--scenario", scenario, "--out", str(out)])
    assert code == 2
    record = json.loads((out / "error.json").read_text())
    assert record["error"] == "SchemaError"
    assert "solver.dt" in record["message"]


def test_simulate_deterministic_outputs(tmp_path):
    scenario = write_scenario(tmp_path, WAVE_SCENARIO)
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["simulate", "--scenario", scenario, "--out", str(out),
                     "--threads", {"a": "1", "b": "4"}[name]]) == 0
        outs.append((out / "gauss_residuals.csv").read_bytes())
    assert outs[0] == outs[1]


# ---------------------------------------------------------------------------
# check-invariance
# ---------------------------------------------------------------------------

def test_check_invariance_end_to_end(tmp_path):
    scenario = write_scenario(tmp_path, WAVE_SCENARIO)
    out = tmp_path / "run"
    assert main(["simulate", "--scenario", scenario, "--out", str(out)]) == 0
    check_out = tmp_path / "check"
    code = main(["check-invariance", "--trajectory", str(out / "trajectory"),
                 "--v0", f"{0.3},0,0", "--out", str(check_out)])
    assert code == 0
    csv = (check_out / "invariance_residuals.csv").read_text()
    lines = csv.strip().splitlines()
    assert lines[0] == RESIDUAL_CSV_HEADER
    equations = {line.split(",")[0] for line in lines[1:]}
    assert {"faraday", "ampere_modified", "gauss_electric_modified",
            "gauss_magnetic", "charge_continuity", "ampere_classical",
            "gauss_electric_classical"} == equations


def test_check_invariance_bad_v0(tmp_path):
    code = main(["check-invariance", "--trajectory", str(tmp_path),
                 "--v0", "1,2", "--out", str(tmp_path / "o")])
    assert code == 2


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def test_identities_csv_and_determinism(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["identities", "--levels", "8,16", "--degree", "2",
                     "--seed", "7", "--out", str(out)]) == 0
        outs.append((out / "identities.csv").read_bytes())
    assert outs[0] == outs[1]
    assert first_line(tmp_path / "a" / "identities.csv") == IDENTITY_CSV_HEADER


# ---------------------------------------------------------------------------
# two-charge
# ---------------------------------------------------------------------------

def test_two_charge_csv_and_summary(tmp_path, capsys):
    out = tmp_path / "tc"
    code = main(["two-charge", "--q1", "1", "--q2", "1", "--pos1", "0,0,0",
                 "--pos2", "1,0,0", "--u", "0,0.5,0", "--units", "normalized",
                 "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "moving_without_motion_field" in printed
    csv = (out / "two_charge_forces.csv").read_text()
    lines = csv.strip().splitlines()
    assert lines[0] == FORCE_TABLE_CSV_HEADER
    rows = {line.split(",")[0]: line.split(",") for line in lines[1:]}
    assert float(rows["moving_without_motion_field"][4]) == pytest.approx(0.75)
    assert float(rows["relativistic_with_motion_field"][4]) == pytest.approx(4 / 3)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def test_kernels_explicit_points(tmp_path):
    out = tmp_path / "k"
    code = main(["kernels", "--q", "12.566370614359172", "--pos", "0,0,0",
                 "--vel", "0,0,0", "--points", "1,0,0;2,0,0",
                 "--units", "normalized", "--out", str(out)])
    assert code == 0
    lines = (out / "kernels.csv").read_text().strip().splitlines()
    assert lines[0] == KERNELS_CSV_HEADER
    assert len(lines) == 3
    row = [float(x) for x in lines[1].split(",")]
    # q = 4*pi: Coulomb field at (1,0,0) is the unit vector
    assert row[3] == pytest.approx(1.0)
    row2 = [float(x) for x in lines[2].split(",")]
    assert row2[3] == pytest.approx(0.25)


def test_kernels_random_sampling_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["kernels", "--vel", "0.1,0,0", "--samples", "5",
                     "--seed", "3", "--units", "normalized",
                     "--out", str(out)]) == 0
        outs.append((out / "kernels.csv").read_bytes())
    assert outs[0] == outs[1]


# ---------------------------------------------------------------------------
# environment overrides
# ---------------------------------------------------------------------------

def test_env_prefix_overrides_defaults(tmp_path, monkeypatch):
    monkeypatch.setenv("EMLAB_SEED", "99")
    monkeypatch.setenv("EMLAB_OUT", str(tmp_path / "envout"))
    assert main(["identities", "--levels", "8,16", "--degree", "1"]) == 0
    manifest = json.loads((tmp_path / "envout" / "manifest.json").read_text())
    assert manifest["seed"] == 99
