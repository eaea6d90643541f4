import numpy as np
import numpy.testing as npt
import pytest

from slipopt.grid import (build_grid, rotate_to_pole, sh_analysis,
                          sh_synthesis, surface_scalar_product)
from slipopt.shapes import ShapeSpec, sphere, tilted_dumbbell


def test_sphere_area_and_centroid():
    g = build_grid(sphere(), 8)
    npt.assert_allclose(g.area, 4.0 * np.pi, rtol=1e-13)
    npt.assert_allclose(g.centroid, 0.0, atol=1e-12)
    assert g.n_nodes == 2 * 8 * 9


def test_sphere_normals_point_away_from_fluid():
    g = build_grid(sphere(), 6)
    npt.assert_allclose(g.normals, -g.nodes, atol=1e-13)
    # orthonormal surface frame
    npt.assert_allclose(np.sum(g.t1 * g.normals, axis=1), 0.0, atol=1e-13)
    npt.assert_allclose(np.sum(g.t2 * g.t1, axis=1), 0.0, atol=1e-13)
    npt.assert_allclose(np.linalg.norm(g.t2, axis=1), 1.0, atol=1e-13)


def test_oblate_spheroid_area():
    a, c = 1.0, 0.5
    e = np.sqrt(1.0 - (c / a) ** 2)
    exact = 2 * np.pi * a**2 + np.pi * c**2 / e * np.log((1 + e) / (1 - e))
    g = build_grid(ShapeSpec(kind="spheroid", semi_axes=(a, a, c)), 24)
    npt.assert_allclose(g.area, exact, rtol=1e-6)


def test_elongated_spheroid_area_converges():
    # geometric (root-limited) convergence: strictly decreasing errors
    a, c = 0.25, 1.0
    e = np.sqrt(1.0 - (a / c) ** 2)
    exact = 2 * np.pi * a**2 * (1 + c / (a * e) * np.arcsin(e))
    errs = [abs(build_grid(ShapeSpec(kind="spheroid",
                                     semi_axes=(a, a, c)), p).area - exact)
            for p in (12, 24, 48)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] / exact < 2e-5


def test_minimum_resolution_enforced():
    with pytest.raises(ValueError):
        build_grid(sphere(), 3)


def test_scalar_product_on_sphere():
    g = build_grid(sphere(), 8)
    # <n, n> = area
    npt.assert_allclose(surface_scalar_product(g, g.normals, g.normals),
                        g.area, rtol=1e-12)
    with pytest.raises(ValueError):
        surface_scalar_product(g, g.normals[:-1], g.normals[:-1])


def test_harmonic_analysis_roundtrip_on_grid():
    g = build_grid(tilted_dumbbell(), 8)
    f = np.cos(g.node_theta) * np.sin(g.node_phi)  # degree-1 content
    coeffs = sh_analysis(g, f)
    back = sh_synthesis(coeffs, grid=g)
    npt.assert_allclose(back, f, atol=1e-12)


def test_rotated_quadrature_reproduces_area():
    # sphere: rotated geometry is exact
    gs = build_grid(sphere(), 8)
    _, w_sphere, _ = rotate_to_pole(gs, 5)
    npt.assert_allclose(w_sphere.sum(), 4.0 * np.pi, rtol=1e-12)
    # deformed shape: accuracy limited by the rotated rule's resolution of
    # the jacobian, tightening with the oversampling factor
    g = build_grid(tilted_dumbbell(), 10)
    for target in (0, g.n_nodes // 2, g.n_nodes - 1):
        _, weights, interp = rotate_to_pole(g, target)
        npt.assert_allclose(weights.sum(), g.area, rtol=5e-3)
        # interpolation is exact for band-limited surface data
        f = np.cos(g.node_theta)
        pos, _, _ = rotate_to_pole(g, target)
        npt.assert_allclose(
            interp @ f,
            np.cos(np.arccos(np.clip(
                pos[:, 2] / np.linalg.norm(pos, axis=1), -1, 1))),
            atol=2e-7)


def test_rotate_to_pole_index_bounds():
    g = build_grid(sphere(), 6)
    with pytest.raises(IndexError):
        rotate_to_pole(g, g.n_nodes)
