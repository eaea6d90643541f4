"""Free-space Stokes fundamental solutions.

Stokeslet ``G(r) = 1/(8 pi mu) (I/|r| + r r^T/|r|^3)`` and stresslet
``T(r) = -3/(4 pi) r x r x r / |r|^5``, plus the interior point-force
solution used as an exact exterior flow for validation.
"""

import numpy as np


def stokeslet(r, mu=1.0):
    """3x3 Stokeslet matrix G(r) for a single separation vector."""
    r = np.asarray(r, dtype=float)
    d = np.linalg.norm(r)
    if d == 0.0:
        raise ValueError("stokeslet is singular at r = 0")
    return (np.eye(3) / d + np.outer(r, r) / d**3) / (8.0 * np.pi * mu)


def stokeslet_field(r, mu=1.0):
    """Batched Stokeslet: separations (..., 3) -> matrices (..., 3, 3)."""
    r = np.asarray(r, dtype=float)
    d = np.linalg.norm(r, axis=-1)
    if np.any(d == 0.0):
        raise ValueError("stokeslet is singular at r = 0")
    inv = 1.0 / d
    G = np.eye(3) * inv[..., None, None]
    G += r[..., :, None] * r[..., None, :] * (inv**3)[..., None, None]
    return G / (8.0 * np.pi * mu)


def stresslet_apply(r, q, n):
    """T(r) q . n = -3/(4 pi) (r.q)(r.n) r / |r|^5, batched over leading axes."""
    r = np.asarray(r, dtype=float)
    q = np.asarray(q, dtype=float)
    n = np.asarray(n, dtype=float)
    d = np.linalg.norm(r, axis=-1)
    if np.any(d == 0.0):
        raise ValueError("stresslet is singular at r = 0")
    coef = -3.0 / (4.0 * np.pi) * np.sum(r * q, axis=-1) * np.sum(r * n, axis=-1)
    return coef[..., None] * r / (d**5)[..., None]


def point_force_solution(F, x0, grid, mu=1.0):
    """Exact exterior flow of a point force inside the body, on the grid.

    Returns the velocity ``u(x) = G(x - x0) F`` and the traction
    ``f(x) = T(x - x0) F . n(x)`` sampled at the grid nodes.  ``x0`` must
    lie strictly inside the body so the flow is smooth on the surface.
    """
    F = np.asarray(F, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    _require_interior(x0, grid.shape)
    r = grid.nodes - x0
    u = np.einsum("nij,j->ni", stokeslet_field(r, mu=mu), F)
    f = stresslet_apply(r, F, grid.normals)
    return u, f


def point_force_velocity(F, x0, points, mu=1.0):
    """Velocity of a point force at arbitrary evaluation points."""
    F = np.asarray(F, dtype=float)
    r = np.asarray(points, dtype=float) - np.asarray(x0, dtype=float)
    return np.einsum("...ij,j->...i", stokeslet_field(r, mu=mu), F)


def _require_interior(x0, shape):
    d = np.linalg.norm(x0)
    if d == 0.0:
        return
    theta = np.arccos(np.clip(x0[2] / d, -1.0, 1.0))
    phi = np.arctan2(x0[1], x0[0])
    r, _, _ = shape.radius(np.atleast_1d(theta), np.atleast_1d(phi))
    if d >= r[0]:
        raise ValueError("point force location must lie strictly inside the body")
