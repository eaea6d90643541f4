"""Spectral surface grids on star-shaped swimmer boundaries.

The surface is parameterized over the unit sphere with a (p+1)-point
Gauss-Legendre rule in the polar direction and a 2p-point trapezoidal rule
in the azimuth, giving N = 2p(p+1) quadrature nodes.  Normals follow the
away-from-the-fluid convention (on the unit sphere, ``n = -x``).

The pole-rotation quadrature used for weakly singular layer-potential
integrals also lives here: for a target node, the parameter sphere is
rotated so the target sits at the pole, and a Gauss-Legendre rule *in the
polar angle itself* with the ``sin(theta')`` area factor kept in the
weights cancels the 1/|r| kernel singularity.  Surface densities are moved
onto the rotated grid by spherical-harmonic resampling; per-ring reference
tables amortize the basis evaluations across all targets on a polar ring.
"""

from dataclasses import dataclass

import numpy as np

from .harmonics import (SphereTransform, degree_orders, sphere_grid_angles,
                        ylm_matrix)
from .shapes import ShapeSpec


@dataclass
class SurfaceGrid:
    """Quadrature nodes, weights and frames of a discretized surface."""

    shape: ShapeSpec
    p: int
    theta: np.ndarray  # (p+1,) polar angles
    phi: np.ndarray  # (2p,) azimuthal angles
    nodes: np.ndarray  # (N, 3)
    normals: np.ndarray  # (N, 3), away from the fluid
    weights: np.ndarray  # (N,), include the surface Jacobian
    t1: np.ndarray  # (N, 3)
    t2: np.ndarray  # (N, 3)
    node_theta: np.ndarray  # (N,)
    node_phi: np.ndarray  # (N,)
    solid_angle_weights: np.ndarray  # (N,)
    jacobian: np.ndarray  # (N,), dS / d(solid angle)
    _transform: SphereTransform = None

    @property
    def transform(self):
        # built on first use; large grids for pure geometry stay cheap
        if self._transform is None:
            self._transform = SphereTransform(self.p)
        return self._transform

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def area(self):
        return float(np.sum(self.weights))

    @property
    def centroid(self):
        return self.weights @ self.nodes / self.area

    def node_index(self, i_theta, k_phi):
        return i_theta * len(self.phi) + k_phi


def _surface_geometry(shape, theta, phi):
    """Positions, area-vector and jacobian of the radial surface map.

    ``theta``/``phi`` are flat arrays of parameter angles.  Returns
    positions (n,3), the outward area vector per unit solid angle (n,3)
    whose norm is the jacobian, and the radius values.
    """
    r, rt, rp = shape.radius(theta, phi)
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    er = np.stack([st * cp, st * sp, ct], axis=-1)
    et = np.stack([ct * cp, ct * sp, -st], axis=-1)
    ep = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1)
    pos = r[:, None] * er
    # rotated quadrature points may land on a parameter pole where both
    # r_phi and sin(theta) vanish; floor the denominator to keep the
    # (finite) ratio well-defined
    rp_over_st = rp / np.maximum(st, 1e-300)
    area_vec = r[:, None] * (r[:, None] * er - rt[:, None] * et
                             - rp_over_st[:, None] * ep)
    return pos, area_vec, r, rt, rp_over_st, er, et, ep


def build_grid(shape, p):
    """Build the degree-p quadrature grid of a shape."""
    if p < 4:
        raise ValueError("grid degree p must be at least 4")
    theta, phi, w = sphere_grid_angles(p)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    th, ph = tt.ravel(), pp.ravel()
    pos, area_vec, r, rt, rp_over_st, er, et, ep = _surface_geometry(shape, th, ph)
    jac = np.linalg.norm(area_vec, axis=1)
    n_out = area_vec / jac[:, None]
    # paper convention: normal points away from the fluid (into the body)
    normals = -n_out
    xt = r[:, None] * et + rt[:, None] * er
    t1 = xt / np.linalg.norm(xt, axis=1)[:, None]
    t2 = np.cross(normals, t1)
    return SurfaceGrid(
        shape=shape,
        p=p,
        theta=theta,
        phi=phi,
        nodes=pos,
        normals=normals,
        weights=w * jac,
        t1=t1,
        t2=t2,
        node_theta=th,
        node_phi=ph,
        solid_angle_weights=w,
        jacobian=jac,
    )


def surface_scalar_product(grid, f, g):
    """L2(surface) scalar product of nodal fields (scalar or vector)."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape or f.shape[0] != grid.n_nodes:
        raise ValueError("fields must share the grid's node layout")
    prod = f * g if f.ndim == 1 else np.sum(f * g, axis=1)
    return float(grid.weights @ prod)


def sh_analysis(grid, values):
    """Spherical-harmonic coefficients of nodal samples (components in columns)."""
    values = np.asarray(values, dtype=float)
    return grid.transform.analyze(values)


def sh_synthesis(coeffs, grid=None, theta=None, phi=None, degree=None):
    """Evaluate coefficient vectors on a grid or at explicit angles."""
    coeffs = np.asarray(coeffs)
    if grid is not None:
        if coeffs.shape[0] != grid.transform.Y.shape[1]:
            raise ValueError("coefficient degree does not match grid degree")
        return grid.transform.synthesize(coeffs)
    if degree is None:
        degree = int(round(np.sqrt(coeffs.shape[0]))) - 1
    Y = ylm_matrix(np.asarray(theta).ravel(), np.asarray(phi).ravel(), degree)
    return (Y @ coeffs).real


def _rotation_to_direction(theta, phi):
    """Rotation taking the north pole to the (theta, phi) direction."""
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    ry = np.array([[ct, 0.0, st], [0.0, 1.0, 0.0], [-st, 0.0, ct]])
    rz = np.array([[cp, -sp, 0.0], [sp, cp, 0.0], [0.0, 0.0, 1.0]])
    return rz @ ry


def polar_quadrature(p_rot):
    """Gauss-Legendre rule in theta' on [0, pi] x trapezoid in phi'.

    The sin(theta') factor of the solid-angle measure is folded into the
    weights, which is what regularizes 1/|r| kernels at the pole.
    """
    x, w = np.polynomial.legendre.leggauss(p_rot + 1)
    tq = 0.5 * np.pi * (x + 1.0)
    wq = 0.5 * np.pi * w * np.sin(tq)
    nphi = 2 * p_rot
    pq = 2.0 * np.pi * np.arange(nphi) / nphi
    tt, pp = np.meshgrid(tq, pq, indexing="ij")
    ww = np.repeat(wq, nphi) * (2.0 * np.pi / nphi)
    return tt.ravel(), pp.ravel(), ww


class PoleRotationTable:
    """Per-ring reference data for the rotated singular quadrature.

    For the reference target of ring i (azimuth 0), stores the parameter
    angles of the rotated quadrature nodes and the harmonic basis matrix
    there.  Any other target on the ring differs by an azimuthal shift
    ``dphi``, handled by evaluating geometry at shifted angles and phasing
    the density coefficients by ``exp(i m dphi)``.
    """

    def __init__(self, grid, oversampling=2):
        self.grid = grid
        self.p_rot = max(grid.p, int(np.ceil(oversampling * grid.p)))
        self.tq, self.pq, self.wq = polar_quadrature(self.p_rot)
        _, self._orders = degree_orders(grid.p)
        self._rings = {}

    @property
    def n_quad(self):
        return self.tq.size

    def ring(self, i_theta):
        if i_theta not in self._rings:
            R = _rotation_to_direction(self.grid.theta[i_theta], 0.0)
            d = np.stack(
                [np.sin(self.tq) * np.cos(self.pq),
                 np.sin(self.tq) * np.sin(self.pq),
                 np.cos(self.tq)], axis=-1)
            u = d @ R.T
            theta_u = np.arccos(np.clip(u[:, 2], -1.0, 1.0))
            phi_u = np.arctan2(u[:, 1], u[:, 0])
            Y = ylm_matrix(theta_u, phi_u, self.grid.p)
            self._rings[i_theta] = (theta_u, phi_u, Y)
        return self._rings[i_theta]

    def phases(self, dphi):
        return np.exp(1j * self._orders * dphi)

    def target_geometry(self, i_theta, dphi):
        """Surface positions and outward area vectors at the rotated nodes."""
        theta_u, phi_u, _ = self.ring(i_theta)
        pos, area_vec, r, _, _, _, _, _ = _surface_geometry(
            self.grid.shape, theta_u, phi_u + dphi)
        return pos, area_vec


def rotate_to_pole(grid, target_index, oversampling=2):
    """Quadrature grid whose polar axis passes through a target node.

    Returns ``(points, weights, interp)`` where ``points`` are surface
    positions at the rotated quadrature nodes, ``weights`` are full surface
    quadrature weights there, and ``interp`` maps nodal samples of a
    surface density onto the rotated nodes (harmonic resampling).
    """
    if not 0 <= target_index < grid.n_nodes:
        raise IndexError("target node index out of range")
    table = PoleRotationTable(grid, oversampling=oversampling)
    nphi = len(grid.phi)
    i_theta, k_phi = divmod(target_index, nphi)
    dphi = grid.phi[k_phi]
    _, _, Y = table.ring(i_theta)
    pos, area_vec = table.target_geometry(i_theta, dphi)
    jac = np.linalg.norm(area_vec, axis=1)
    weights = table.wq * jac
    basis = Y * table.phases(dphi)[None, :]
    interp = (basis @ grid.transform.analysis_matrix).real
    return pos, weights, interp
