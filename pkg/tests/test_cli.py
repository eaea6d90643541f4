import json
import os

import numpy as np
import numpy.testing as npt
import pytest
from click.testing import CliRunner

from slipopt.cli import (ConfigError, EXIT_CONFIG, load_config, main,
                         point_force_study, write_json)

PROLATE_YAML = "kind: spheroid\nsemi_axes: [0.25, 0.25, 1.0]\n"
DUMBBELL_YAML = (
    "kind: radial\nbase_radius: 1.0\ncomposition: additive\n"
    "terms:\n  - {l: 2, m: 1, c_re: 1.0}\n  - {l: 3, m: 2, c_re: 0.1}\n"
)


@pytest.fixture()
def shape_file(tmp_path):
    path = tmp_path / "shape.yaml"
    path.write_text(PROLATE_YAML)
    return str(path)


def test_load_config_validation(shape_file):
    cfg = load_config(shape_file, 12)
    assert cfg.p == 12 and cfg.mode == "auto"
    with pytest.raises(ConfigError):
        load_config(shape_file, 3)
    with pytest.raises(ConfigError):
        load_config(shape_file, 12, mode="sideways")
    with pytest.raises(ConfigError):
        load_config(shape_file, 12, fixed_w="1,2")
    with pytest.raises(ConfigError):
        load_config(shape_file, 12, fixed_w="0,0,0")
    with pytest.raises(ConfigError):
        load_config(shape_file, 12, alpha="not,numbers,at,all,x,y")
    with pytest.raises(ConfigError):
        load_config(shape_file, 12, traj_t=1.0)  # dt missing
    with pytest.raises(ConfigError):
        load_config(str(shape_file) + ".missing", 12)


def test_json_determinism(tmp_path):
    data = {"x": 1 / 3, "v": np.array([1.0, 2.0, np.pi]),
            "flag": True, "name": "run", "n": 7,
            "nested": {"bad": float("nan")}}
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_json(p1, data)
    write_json(p2, data)
    assert p1.read_bytes() == p2.read_bytes()
    parsed = json.loads(p1.read_text())
    # 17 significant digits round-trip float64 exactly
    assert parsed["x"] == 1 / 3
    assert parsed["v"][2] == np.pi
    assert parsed["nested"]["bad"] is None


def test_validate_command_bad_shape(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, ["validate", "--shape",
                                  str(tmp_path / "nope.yaml")])
    assert result.exit_code == EXIT_CONFIG


def test_point_force_study_decays():
    from slipopt.shapes import wavy_validation_shape

    records = point_force_study(wavy_validation_shape(), [6, 10])
    assert records[1]["flow_error"] < records[0]["flow_error"]


def test_trajectory_command(tmp_path, shape_file):
    runner = CliRunner()
    out = str(tmp_path / "out")
    result = runner.invoke(main, [
        "trajectory", "--shape", shape_file, "--U", "1,0,1",
        "--Omega", "0,0,2", "--traj-T", "3.14", "--traj-dt", "0.01",
        "--out", out])
    assert result.exit_code == 0, result.output
    assert os.path.exists(os.path.join(out, "trajectory_path.csv"))
    assert os.path.exists(os.path.join(out, "trajectory_path.vtk"))
    report = json.loads(
        open(os.path.join(out, "trajectory.json")).read())
    assert report["class"] == "helical"


def test_optimize_alpha_query_and_cache(tmp_path):
    shape = tmp_path / "dumbbell.yaml"
    shape.write_text(DUMBBELL_YAML)
    runner = CliRunner()
    out1, out2 = str(tmp_path / "o1"), str(tmp_path / "o2")
    args = ["optimize", "--shape", str(shape), "--p", "8",
            "--alpha", "0.15,0.74,0.26,0.53,0.01,0.92"]
    r1 = runner.invoke(main, args + ["--out", out1])
    assert r1.exit_code == 0, r1.output
    res = json.loads(open(os.path.join(out1, "optimize.json")).read())
    npt.assert_allclose(res["alpha_query"]["power"], 30.711781703874,
                        rtol=1e-9)
    # warm the cache in out1, then verify a cached re-run is bit-identical
    r1b = runner.invoke(main, args + ["--out", out1])
    assert r1b.exit_code == 0
    assert os.listdir(os.path.join(out1, "cache"))
    b1 = open(os.path.join(out1, "optimize.json"), "rb").read()
    r2 = runner.invoke(main, args + ["--out", out2])
    assert r2.exit_code == 0
    b2 = open(os.path.join(out2, "optimize.json"), "rb").read()
    assert b1 == b2


def test_fixed_w_bypasses_global_search(tmp_path):
    shape = tmp_path / "dumbbell.yaml"
    shape.write_text(DUMBBELL_YAML)
    runner = CliRunner()
    out = str(tmp_path / "out")
    result = runner.invoke(main, [
        "optimize", "--shape", str(shape), "--p", "8",
        "--fixed-W", "0,0,1", "--out", out])
    assert result.exit_code == 0, result.output
    res = json.loads(open(os.path.join(out, "optimize.json")).read())
    assert "fixed_W_gait" in res and "gait" not in res


def test_export_roundtrip(tmp_path):
    shape = tmp_path / "dumbbell.yaml"
    shape.write_text(DUMBBELL_YAML)
    runner = CliRunner()
    out = str(tmp_path / "out")
    result = runner.invoke(main, ["export", "--shape", str(shape),
                                  "--p", "8", "--out", out])
    assert result.exit_code == 0, result.output
    mats = json.loads(open(os.path.join(out, "matrices.json")).read())
    C = np.array(mats["C"])
    C_inv = np.array(mats["C_inverse"])
    # 17-digit serialization re-imports bit-exact: inverse consistency
    npt.assert_allclose(C @ C_inv, np.eye(6), atol=1e-10)
    vtk = open(os.path.join(out, "fields.vtk")).read()
    assert "VECTORS y1 double" in vtk
    assert "VECTORS y6 double" in vtk


def test_axisym_command(tmp_path, shape_file):
    runner = CliRunner()
    out = str(tmp_path / "out")
    result = runner.invoke(main, ["axisym", "--shape", shape_file,
                                  "--p", "8", "--out", out])
    assert result.exit_code == 0, result.output
    res = json.loads(open(os.path.join(out, "axisym.json")).read())
    assert res["gait"]["classification"] == "axial"


def test_axisym_command_rejects_general_shape(tmp_path):
    shape = tmp_path / "dumbbell.yaml"
    shape.write_text(DUMBBELL_YAML)
    runner = CliRunner()
    result = runner.invoke(main, ["axisym", "--shape", str(shape),
                                  "--p", "8", "--out", str(tmp_path)])
    assert result.exit_code == EXIT_CONFIG
