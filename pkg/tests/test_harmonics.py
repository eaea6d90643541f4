import numpy as np
import numpy.testing as npt

from slipopt.harmonics import (SphereTransform, coeff_index, degree_orders,
                               gauss_legendre_ring, num_coeffs,
                               sphere_grid_angles, ylm_matrix)


def test_coefficient_ordering():
    assert num_coeffs(3) == 16
    assert coeff_index(0, 0) == 0
    assert coeff_index(2, -2) == 4
    assert coeff_index(2, 0) == 6
    ls, ms = degree_orders(2)
    assert list(ls) == [0, 1, 1, 1, 2, 2, 2, 2, 2]
    assert list(ms) == [0, -1, 0, 1, -2, -1, 0, 1, 2]


def test_gauss_ring_integrates_polynomials():
    theta, w = gauss_legendre_ring(6)
    # integral of cos^2(theta) d(cos theta) over [-1, 1] = 2/3
    npt.assert_allclose(w @ np.cos(theta) ** 2, 2.0 / 3.0, rtol=1e-14)
    npt.assert_allclose(w.sum(), 2.0, rtol=1e-14)
    assert np.all(np.diff(theta) > 0)


def test_solid_angle_weights_sum():
    _, _, w = sphere_grid_angles(8)
    npt.assert_allclose(w.sum(), 4.0 * np.pi, rtol=1e-13)


def test_harmonics_orthonormal_under_quadrature():
    p = 10
    tr = SphereTransform(p, degree=4)
    W = tr.Y.conj().T * tr.solid_angle_weights
    gram = W @ tr.Y
    npt.assert_allclose(gram, np.eye(gram.shape[0]), atol=1e-12)


def test_analysis_synthesis_roundtrip():
    p = 8
    tr = SphereTransform(p)
    rng = np.random.default_rng(3)
    coeffs = rng.normal(size=num_coeffs(p - 1))
    # band-limited below top degree: synthesize-analyze is the identity
    values = (ylm_matrix(tr.theta, tr.phi, p - 1) @ coeffs).real
    back = tr.synthesize(tr.analyze(values))
    npt.assert_allclose(back, values, atol=1e-12)


def test_projector_is_idempotent():
    tr = SphereTransform(8)
    P = tr.projector
    npt.assert_allclose(P @ P, P, atol=1e-12)
    # aliasing of m = +-p on the 2p azimuth grid removes one dimension
    assert tr.projector_rank == num_coeffs(8) - 1


def test_ylm_derivatives_match_finite_differences():
    theta = np.array([0.7, 1.3, 2.1])
    phi = np.array([0.3, 2.0, 4.4])
    Y, dYt, dYp = ylm_matrix(theta, phi, 5, derivatives=True)
    h = 1e-6
    Yt = ylm_matrix(theta + h, phi, 5)
    Yp = ylm_matrix(theta, phi + h, 5)
    npt.assert_allclose(dYt, (Yt - Y) / h, atol=2e-5)
    npt.assert_allclose(dYp, (Yp - Y) / h, atol=2e-5)
