"""Dimension reduction: the optimal six-dimensional slip space.

Six auxiliary mixed boundary-value problems (tangential traction data
``Pi f^a_i``, zero relative normal velocity, zero-net-force constraints)
produce slip fields ``z_i`` and tractions ``f_i``.  The reduction matrix
``A_ij = <f_i, z_j>`` is SPD, and ``y = z A^{-1}`` maps a rigid-motion
target ``alpha`` to the minimum-power slip ``y . alpha``, whose power is
``alpha^t A^{-1} alpha``.

Rigid directions that are tangential on the surface (the spin of a body
of revolution, all rotations of a sphere) make the plain auxiliary
problems ill-posed: the extractor data violates the corresponding
no-net-force row.  For each such direction the data gains the corrective
term ``u^R_l / <u^R_l, u^R_l>`` and the force constraint is swapped for
the spin-orthogonality row ``<v - v^R, u^R_l> = 0``, restricting slips to
the spin-free subspace.
"""

from dataclasses import dataclass

import numpy as np

from .bie import solve_mixed
from .grid import surface_scalar_product
from .rigid_body import ResolutionError, tangential_rigid_directions


@dataclass
class GaitSystem:
    grid: object
    rigid: object  # RigidSystem
    A: np.ndarray  # (6, 6) SPD reduction matrix
    Z: np.ndarray  # (6, 6) = A^{-1}
    z_fields: np.ndarray  # (6, N, 3) auxiliary slips
    y_fields: np.ndarray  # (6, N, 3) optimal slip basis, y = z A^{-1}
    tractions: np.ndarray  # (6, N, 3) tractions f[v_i]
    rigid_parts: np.ndarray  # (6, 6) rigid coefficients of each v_i
    asymmetry_residual: float
    degenerate_directions: tuple
    unreachable_dimension: int = 0

    @property
    def C(self):
        return self.rigid.C

    @property
    def Z_UU(self):
        return self.Z[:3, :3]

    @property
    def Z_UO(self):
        return self.Z[:3, 3:]

    @property
    def Z_OO(self):
        return self.Z[3:, 3:]

    def slip_for_alpha(self, alpha):
        """Minimum-power slip y . alpha achieving the rigid motion alpha."""
        return np.einsum("l,lnk->nk", np.asarray(alpha, dtype=float),
                         self.y_fields)


def tangential_part(grid, field):
    field = np.asarray(field, dtype=float)
    return field - np.sum(field * grid.normals, axis=1)[:, None] * grid.normals


def build_gait_system(grid, operators, rigid_system, mode="general"):
    """Solve the six auxiliary problems and assemble A, Z and the y basis.

    ``mode`` is a declaration checked against the shape: "axisym" requires
    the spin direction (and only it) to be tangential; "general" accepts
    any shape and adapts to whatever tangential rigid directions exist.
    """
    degenerate = tuple(tangential_rigid_directions(grid, rigid_system.basis))
    if mode == "axisym" and 5 not in degenerate:
        raise ResolutionError(
            "axisym mode requires the spin field e3 x x to be tangential")
    if mode not in ("general", "axisym"):
        raise ValueError(f"unknown mode {mode!r}")
    constraints = [("spin", k) if k in degenerate else ("force", k)
                   for k in range(6)]
    N = grid.n_nodes
    z = np.empty((6, N, 3))
    f = np.empty((6, N, 3))
    rigid_parts = np.empty((6, 6))
    for i in range(6):
        g = tangential_part(grid, rigid_system.extractors[i])
        if i in degenerate:
            uR = rigid_system.basis[i]
            g = g + uR / surface_scalar_product(grid, uR, uR)
        sol = solve_mixed(grid, operators, g,
                          rigid_fields=rigid_system.basis,
                          constraints=constraints)
        z[i] = sol.slip
        f[i] = sol.traction
        rigid_parts[i] = sol.rigid_coeffs
    A = np.array([[surface_scalar_product(grid, f[i], z[j])
                   for j in range(6)] for i in range(6)])
    asym = float(np.abs(A - A.T).max() / np.abs(A).max())
    A = 0.5 * (A + A.T)
    vals, vecs = np.linalg.eigh(A)
    tol = 1e-10 * vals[-1]
    if vals[0] < -tol:
        raise ResolutionError(
            f"reduction matrix is not positive definite "
            f"(smallest eigenvalue {vals[0]:.3e})")
    # Exactly zero eigenvalues occur for rigid motions no slip can produce
    # (rotating a sphere): the corrected auxiliary data vanishes and the
    # corresponding z_i is identically zero.  Invert A on its range; those
    # motions are reported as unreachable.
    keep = vals > tol
    Z = (vecs[:, keep] / vals[keep]) @ vecs[:, keep].T
    y = np.einsum("jnk,ji->ink", z, Z)
    return GaitSystem(grid=grid, rigid=rigid_system, A=A, Z=Z, z_fields=z,
                      y_fields=y, tractions=f, rigid_parts=rigid_parts,
                      asymmetry_residual=asym,
                      degenerate_directions=degenerate,
                      unreachable_dimension=int(6 - keep.sum()))


def power_from_alpha(system, alpha):
    """Minimum power alpha^t A^{-1} alpha achieving the rigid motion alpha."""
    alpha = np.asarray(alpha, dtype=float)
    return float(alpha @ system.Z @ alpha)


def perfect_slip_resistance(system):
    """R_PS = (A + C^{-1})^{-1}, the resistance of a perfect-slip body.

    Evaluated as (I + Z C^{-1})^{-1} Z, which stays correct when some
    motions are unreachable (Z singular): there the effective A is
    infinite and the perfect-slip resistance vanishes.
    """
    Z = system.Z
    return np.linalg.solve(np.eye(6) + Z @ system.rigid.C_inverse, Z)


def efficiency(system, alpha):
    """eta = alpha^t (A + C^{-1})^{-1} alpha / alpha^t A^{-1} alpha in (0, 1]."""
    alpha = np.asarray(alpha, dtype=float)
    if not np.any(alpha):
        raise ValueError("efficiency is undefined for alpha = 0")
    num = float(alpha @ perfect_slip_resistance(system) @ alpha)
    return num / power_from_alpha(system, alpha)
