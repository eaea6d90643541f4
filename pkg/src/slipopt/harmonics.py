"""Complex spherical harmonics utilities.

Conventions: orthonormal complex harmonics with the Condon-Shortley phase,
as provided by :func:`scipy.special.sph_harm_y` (``theta`` is the polar
angle, ``phi`` the azimuth).  Coefficient vectors are stored flat, ordered
by degree ``l = 0..L`` and, within a degree, order ``m = -l..l``, so that
the entry of ``(l, m)`` sits at index ``l*l + l + m``.
"""

import numpy as np
from scipy.special import sph_harm_y


def num_coeffs(degree):
    return (degree + 1) ** 2


def coeff_index(l, m):
    return l * l + l + m


def degree_orders(degree):
    """Flat arrays (l, m) matching the coefficient ordering."""
    ls = np.concatenate([np.full(2 * l + 1, l) for l in range(degree + 1)])
    ms = np.concatenate([np.arange(-l, l + 1) for l in range(degree + 1)])
    return ls, ms


def ylm_matrix(theta, phi, degree, derivatives=False):
    """Evaluate all harmonics up to ``degree`` at the given angles.

    Returns ``Y`` of shape (npts, ncoef); with ``derivatives=True`` also
    returns ``dY/dtheta`` and ``dY/dphi`` of the same shape.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    ls, ms = degree_orders(degree)
    if not derivatives:
        Y = sph_harm_y(ls[:, None], ms[:, None], theta[None, :], phi[None, :])
        return Y.T.copy()
    Y, grad = sph_harm_y(
        ls[:, None], ms[:, None], theta[None, :], phi[None, :], diff_n=1
    )
    return Y.T.copy(), grad[..., 0].T.copy(), grad[..., 1].T.copy()


def gauss_legendre_ring(p):
    """Polar Gauss-Legendre nodes/weights for a degree-p sphere grid.

    Nodes are ``cos(theta)`` Gauss-Legendre points mapped to ``theta`` in
    increasing order; weights integrate ``d(cos theta)``.
    """
    x, w = np.polynomial.legendre.leggauss(p + 1)
    theta = np.arccos(x)[::-1].copy()
    w = w[::-1].copy()
    return theta, w


def sphere_grid_angles(p):
    """Angles and solid-angle weights of the (p+1) x 2p product grid.

    Returns ``theta`` (p+1,), ``phi`` (2p,), and the per-node solid-angle
    weights ``w`` (N,) flattened with theta as the slow index.
    """
    theta, wt = gauss_legendre_ring(p)
    nphi = 2 * p
    phi = 2.0 * np.pi * np.arange(nphi) / nphi
    w = np.repeat(wt, nphi) * (2.0 * np.pi / nphi)
    return theta, phi, w


class SphereTransform:
    """Forward/inverse spherical-harmonic transform on the product grid.

    Analysis uses the Gauss-Legendre solid-angle weights; on the 2p-point
    azimuthal grid the orders ``m = p`` and ``m = -p`` alias each other, so
    fields should be resolved below the top order for exact round trips.
    """

    def __init__(self, p, degree=None):
        self.p = p
        self.degree = p if degree is None else degree
        theta, phi, w = sphere_grid_angles(p)
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        self.theta = tt.ravel()
        self.phi = pp.ravel()
        self.solid_angle_weights = w
        self.Y = ylm_matrix(self.theta, self.phi, self.degree)
        # Weighted least-squares analysis.  The Gram matrix Y^H W Y is the
        # identity except for the (l=p, m=+-p) pair, which aliases on the
        # 2p-point azimuthal grid (e^{ip phi} = e^{-ip phi} there); the
        # pseudo-inverse resolves that rank-1 defect so that
        # Y @ analysis_matrix is an exact projector onto the sampled
        # band-limited space.
        quad = self.Y.conj().T * w[None, :]
        gram = quad @ self.Y
        self.analysis_matrix = np.linalg.pinv(gram, rcond=1e-8) @ quad
        self.projector = (self.Y @ self.analysis_matrix).real
        self.projector_rank = int(round(np.trace(self.projector)))

    def analyze(self, values):
        """Nodal samples (N,) or (N, k) -> coefficients (ncoef,) or (ncoef, k)."""
        return self.analysis_matrix @ values

    def synthesize(self, coeffs, Y=None):
        """Coefficients -> real nodal values, optionally on another basis matrix."""
        Y = self.Y if Y is None else Y
        return (Y @ coeffs).real
