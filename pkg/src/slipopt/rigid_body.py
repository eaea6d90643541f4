"""Rigid-body basis flows, resistance matrix, and swim-velocity extraction.

The six rigid velocity fields are ``u^R_i = e_i`` and ``u^R_{i+3} = e_i x x``.
Their Dirichlet tractions define the (no-slip) resistance matrix
``C_kl = <u^R_k, f^R_l>`` and the extractor tractions ``f^a = -f^R C^{-1}``,
whose pairings ``alpha_i[u^S] = <f^a_i, u^S>`` give the rigid-body motion
induced by a tangential slip on a force- and torque-free swimmer.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .bie import solve_dirichlet
from .grid import surface_scalar_product


class ResolutionError(RuntimeError):
    """A computed matrix violates a structural property (e.g. not SPD),
    which signals an under-resolved discretization."""


def rigid_basis(grid):
    """The six rigid velocity fields, shape (6, N, 3)."""
    N = grid.n_nodes
    fields = np.zeros((6, N, 3))
    for i in range(3):
        fields[i, :, i] = 1.0
        fields[i + 3] = np.cross(np.eye(3)[i], grid.nodes)
    return fields


def tangential_rigid_directions(grid, basis=None, tol=1e-10):
    """Indices of rigid fields tangential on the whole surface.

    Nonempty for bodies of revolution (the spin about the axis) and for
    the sphere (all three rotations); these directions make the general
    extractor problems ill-posed and require the modified data/constraints.
    """
    if basis is None:
        basis = rigid_basis(grid)
    out = []
    for l, u in enumerate(basis):
        scale = np.abs(u).max()
        if scale == 0.0:
            continue
        if np.abs(np.sum(u * grid.normals, axis=1)).max() < tol * scale:
            out.append(l)
    return out


@dataclass
class RigidSystem:
    grid: object
    basis: np.ndarray  # (6, N, 3) rigid velocity fields
    tractions: np.ndarray  # (6, N, 3) Dirichlet tractions f^R
    C: np.ndarray  # (6, 6) resistance matrix
    extractors: np.ndarray  # (6, N, 3) extractor tractions f^a
    symmetry_residual: float

    @property
    def C_inverse(self):
        return cho_solve(self._cho, np.eye(6))

    def rigid_field(self, alpha):
        """v^R(x) = U + Omega x x for alpha = [U; Omega]."""
        return np.einsum("l,lnk->nk", np.asarray(alpha, dtype=float),
                         self.basis)


def assemble_rigid_system(grid, operators):
    """Six Dirichlet solves -> (basis, C, extractors) bundle.

    Raises :class:`ResolutionError` when the computed C is not symmetric
    positive definite, which indicates an under-resolved grid.
    """
    basis = rigid_basis(grid)
    tractions = np.empty_like(basis)
    for l in range(6):
        _, tractions[l], _ = solve_dirichlet(grid, operators, basis[l])
    C = np.array([[surface_scalar_product(grid, basis[k], tractions[l])
                   for l in range(6)] for k in range(6)])
    sym_res = float(np.abs(C - C.T).max() / np.abs(C).max())
    C = 0.5 * (C + C.T)
    try:
        cho = cho_factor(C)
    except np.linalg.LinAlgError as exc:
        raise ResolutionError(
            f"resistance matrix is not positive definite: {exc}")
    C_inv = cho_solve(cho, np.eye(6))
    extractors = -np.einsum("lnk,li->ink", tractions, C_inv)
    system = RigidSystem(grid=grid, basis=basis, tractions=tractions, C=C,
                         extractors=extractors, symmetry_residual=sym_res)
    system._cho = cho
    return system


def swim_velocity(system, uS):
    """alpha = [U; Omega] induced by the tangential slip uS."""
    return np.array([
        surface_scalar_product(system.grid, system.extractors[i], uS)
        for i in range(6)
    ])


def power_loss_direct(system, operators, uS):
    """Power dissipated by the slip uS on the free swimmer.

    Solves one Dirichlet problem with datum ``uS + v^R(alpha[uS])`` and
    returns ``<f[u], u>``.
    """
    uS = np.asarray(uS, dtype=float)
    alpha = swim_velocity(system, uS)
    u = uS + system.rigid_field(alpha)
    _, f, _ = solve_dirichlet(system.grid, operators, u)
    return surface_scalar_product(system.grid, f, u)


def drag_power(C, alpha):
    """J_D = alpha^t C alpha, the power of the matched no-slip motion."""
    alpha = np.asarray(alpha, dtype=float)
    return float(alpha @ C @ alpha)
