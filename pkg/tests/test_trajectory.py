import numpy as np
import numpy.testing as npt
import pytest

from slipopt.trajectory import (analytic_helix, helix_geometry,
                                integrate_path, net_velocity, write_path_csv,
                                write_path_vtk)


def test_net_velocity_cases():
    W, cls = net_velocity([1, 0, 1], [0, 0, 2])
    npt.assert_allclose(W, [0, 0, 1])
    assert cls == "helical"
    W, cls = net_velocity([1, 0, 0], [0, 0, 2])
    npt.assert_allclose(W, 0.0)
    assert cls == "circular"
    W, cls = net_velocity([1, 0, 1], [0, 0, 0])
    npt.assert_allclose(W, [1, 0, 1])
    assert cls == "pure-translation"
    W, cls = net_velocity([0, 0, 1], [0, 0, 3])
    assert cls == "spinning-straight"


def test_net_velocity_scale_equivariance():
    U = np.array([0.3, -0.7, 1.1])
    Om = np.array([0.2, 0.5, -0.1])
    W1, _ = net_velocity(U, Om)
    W2, _ = net_velocity(3.0 * U, 3.0 * Om)
    npt.assert_allclose(W2, 3.0 * W1, rtol=1e-12)


def test_helix_geometry_formulas():
    geom = helix_geometry(2.0, np.array([1.0, 0, 0]), np.array([0, 0, 1.0]))
    npt.assert_allclose(geom.radius, 0.5)
    npt.assert_allclose(geom.pitch, np.pi)
    npt.assert_allclose(geom.period, np.pi)
    npt.assert_allclose(geom.axis, [0, 0, 1])
    assert not geom.near_degenerate


def test_helix_geometry_degenerate_limits():
    straight = helix_geometry(3.0, np.zeros(3), np.array([0, 0, 1.0]))
    assert straight.radius == 0.0
    drift = helix_geometry(0.0, np.array([1.0, 0, 0]), np.array([0, 0, 1.0]))
    assert np.isinf(drift.radius)
    assert drift.near_degenerate


def test_straight_line_is_exact():
    U = np.array([0.5, -0.25, 1.0])
    t, pos, quat = integrate_path(U, np.zeros(3), 2.0, 0.01)
    npt.assert_allclose(pos, t[:, None] * U[None, :], atol=1e-13)
    npt.assert_allclose(quat[:, 0], 1.0, atol=1e-13)


def test_integrated_path_matches_analytic_helix():
    W = np.array([0.0, 0.7937, 0.6083])
    s = -0.333
    V = np.array([0.35, -0.2, 0.26])
    V -= (V @ W) / (W @ W) * W
    geom = helix_geometry(s, V, W)
    dt = geom.period / 1000
    t, pos, _ = integrate_path(W + V, s * W, 2 * geom.period, dt)
    ref = analytic_helix(s, V, W, t)
    assert np.abs(pos - ref).max() < 1e-8


def test_orientation_norm_preserved():
    _, _, quat = integrate_path(np.array([1.0, 0, 0]),
                                np.array([0.3, 1.1, -0.7]), 100.0, 0.01)
    assert quat.shape[0] == 10001
    assert np.abs(np.linalg.norm(quat, axis=1) - 1.0).max() < 1e-12


def test_path_stays_on_helix_cylinder():
    W = np.array([0.0, 0.0, 1.0])
    s = 1.5
    V = np.array([0.8, 0.0, 0.0])
    geom = helix_geometry(s, V, W)
    t, pos, _ = integrate_path(W + V, s * W, 4 * np.pi, geom.period / 500)
    # helix axis passes through the circle center (axis x V)/|Omega|
    center = np.cross(geom.axis, V) / abs(s * np.linalg.norm(W))
    radial = pos - center - np.outer((pos - center) @ geom.axis, geom.axis)
    npt.assert_allclose(np.linalg.norm(radial, axis=1), geom.radius,
                        atol=1e-6)


def test_bad_integration_parameters():
    with pytest.raises(ValueError):
        integrate_path(np.ones(3), np.ones(3), -1.0, 0.1)
    with pytest.raises(ValueError):
        integrate_path(np.ones(3), np.ones(3), 1.0, 0.0)


def test_csv_and_vtk_export(tmp_path):
    t, pos, quat = integrate_path(np.array([1.0, 0, 0]),
                                  np.array([0, 0, 1.0]), 1.0, 0.1)
    csv_file = tmp_path / "path.csv"
    vtk_file = tmp_path / "path.vtk"
    write_path_csv(csv_file, t, pos, quat)
    write_path_vtk(vtk_file, pos)
    lines = csv_file.read_text().strip().splitlines()
    assert lines[0] == "t,x,y,z,qw,qx,qy,qz"
    assert len(lines) == len(t) + 1
    # round-trip the first data row exactly
    row = np.array([float(v) for v in lines[1].split(",")])
    npt.assert_allclose(row[1:4], pos[0], rtol=0, atol=0)
    vtk = vtk_file.read_text()
    assert "DATASET POLYDATA" in vtk
    assert f"POINTS {len(t)} double" in vtk
