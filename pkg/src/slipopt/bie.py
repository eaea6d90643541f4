"""Single-layer boundary-integral solver for exterior Stokes flow.

The flow is represented as ``u = S[mu]`` with a single-layer density
``mu`` on the surface.  Two boundary-value problems are supported:

* Dirichlet: ``S[mu] = uD`` (first kind); the one-dimensional null space
  spanned by the normal is removed by the rank-one completion
  ``S~[mu] = S[mu] + n <n, mu>``, which vanishes at the solution for
  compatible (zero-flux) data.
* Mixed: tangential traction and normal velocity prescribed, optionally
  with six free rigid-motion amplitudes and six integral constraints
  (zero net force/torque of the traction, or a spin-orthogonality row).

The surface traction of the representation is recovered from the density
through the jump relation ``f = -1/2 mu + K[mu]`` with the principal-value
stresslet operator K.  Both dense operators are assembled with the
pole-rotation singular quadrature; targets on the same polar ring share
the rotated harmonic basis, with the azimuthal shift absorbed into
coefficient phases.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.sparse.linalg import LinearOperator, gmres

from .grid import PoleRotationTable
from .kernels import stokeslet_field

# Traction jump relation f = (1/2) mu + K[mu], with K built from the
# stresslet contracted against the away-from-the-fluid surface normal.
# The signs are pinned empirically: a translating unit sphere must carry
# the uniform fluid-side traction (3/2) U (net force 6 pi U, positive
# dissipation pairing), and the point-force validation must reproduce
# T(x - x0) F . n(x).  (Equivalently: -1/2 mu + K[mu] with the kernel
# contracted against the outward normal is the negated, drag-side field.)
JUMP_COEFFICIENT = 0.5
_PV_SIGN = 1.0


class SolverError(RuntimeError):
    """Linear solve failed to converge; carries the final residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass
class SlpOperator:
    """Dense discretization of the single-layer velocity operator.

    ``matrix`` includes the spectral-tail term ``tau (I - P)`` (P = nodal
    harmonic projector): the quadrature interpolates densities through the
    degree-p harmonic space, so the raw discrete operator annihilates the
    3(N - (p+1)^2) out-of-band nodal modes.  Acting as ``tau`` on those
    modes mirrors the true operator's decaying symbol at the grid cutoff
    (tau is calibrated to the smallest resolved singular value) and keeps
    the linear systems uniquely solvable for arbitrary nodal data.
    """

    grid: object
    matrix: np.ndarray  # (3N, 3N), regularized
    projector: np.ndarray  # (3N, 3N) nodal band-limit projector
    tail_coefficient: float

    def apply(self, density):
        return (self.matrix @ np.ravel(density)).reshape(-1, 3)


@dataclass
class TractionOperator:
    """Traction of the single-layer potential, f = -1/2 mu + K[mu]."""

    grid: object
    pv_matrix: np.ndarray  # (3N, 3N), principal-value part only

    @property
    def matrix(self):
        return JUMP_COEFFICIENT * np.eye(self.pv_matrix.shape[0]) + self.pv_matrix

    def apply(self, density):
        mu = np.asarray(density, dtype=float).reshape(-1, 3)
        pv = (self.pv_matrix @ mu.ravel()).reshape(-1, 3)
        return JUMP_COEFFICIENT * mu + pv


def assemble_operators(grid, oversampling=2):
    """Assemble the single-layer and principal-value traction operators.

    One pass of the pole-rotation quadrature per target provides both
    kernels; the per-ring rotated harmonic basis is shared across the
    ring's targets through azimuthal coefficient phases.
    """
    table = PoleRotationTable(grid, oversampling=oversampling)
    N = grid.n_nodes
    nphi = len(grid.phi)
    analysis = grid.transform.analysis_matrix  # (ncoef, N)
    S = np.empty((3 * N, 3 * N))
    K = np.empty((3 * N, 3 * N))
    eye3 = np.eye(3)
    for i_theta in range(len(grid.theta)):
        _, _, Y = table.ring(i_theta)
        for k_phi in range(nphi):
            t = i_theta * nphi + k_phi
            dphi = grid.phi[k_phi]
            pos, area_vec = table.target_geometry(i_theta, dphi)
            w = table.wq * np.linalg.norm(area_vec, axis=1)
            d = grid.nodes[t] - pos  # target minus source
            inv_r = 1.0 / np.linalg.norm(d, axis=1)
            dd = d[:, :, None] * d[:, None, :]
            Gw = eye3 * inv_r[:, None, None] + dd * (inv_r**3)[:, None, None]
            Gw *= (w / (8.0 * np.pi))[:, None, None]
            dn = d @ grid.normals[t]
            Tw = dd * (-3.0 / (4.0 * np.pi) * _PV_SIGN
                       * dn * inv_r**5 * w)[:, None, None]
            Yp = Y * table.phases(dphi)[None, :]
            rowc = np.einsum("sqij,qc->sijc", np.stack((Gw, Tw)), Yp,
                             optimize=True)
            rows = np.einsum("sijc,cn->sinj", rowc, analysis,
                             optimize=True).real
            S[3 * t:3 * t + 3] = rows[0].reshape(3, 3 * N)
            K[3 * t:3 * t + 3] = rows[1].reshape(3, 3 * N)
    # spectral-tail regularization: tau = smallest resolved singular value
    # of the null-space-completed operator on the band-limited range
    projector = np.kron(grid.transform.projector, np.eye(3))
    rank = 3 * grid.transform.projector_rank
    ns = grid.normals.ravel()
    wn = (grid.weights[:, None] * grid.normals).ravel()
    sigma = np.linalg.svd((S + np.outer(ns, wn)) @ projector,
                          compute_uv=False)
    tau = float(sigma[rank - 1])
    S += tau * (np.eye(3 * N) - projector)
    return SlpOperator(grid, S, projector, tau), TractionOperator(grid, K)


def completed_slp_matrix(slp):
    """S~ = S + n <n, .>: removes the normal-density null space."""
    grid = slp.grid
    ns = grid.normals.ravel()
    wn = (grid.weights[:, None] * grid.normals).ravel()
    return slp.matrix + np.outer(ns, wn)


def _solve_gmres(matrix, rhs, rtol=1e-10, restart=80, maxiter=500):
    """Restarted GMRES on a precomputed dense matrix.

    The assembled block systems are well-conditioned but non-normal (mixed
    traction/velocity/constraint rows), which stalls unpreconditioned
    Krylov iterations; an LU factorization of the dense matrix serves as
    the preconditioner, and the final residual is verified explicitly.
    """
    scale = np.linalg.norm(rhs)
    if scale == 0.0:
        return np.zeros_like(rhs)
    n_inner = [0]

    def _count(pr_norm):
        n_inner[0] += 1

    try:
        lu_piv = lu_factor(matrix)
    except ValueError as exc:
        raise SolverError(f"factorization of the block system failed: {exc}")
    op = LinearOperator(matrix.shape, matvec=lambda v: matrix @ v)
    precond = LinearOperator(matrix.shape,
                             matvec=lambda v: lu_solve(lu_piv, v))
    x, info = gmres(op, rhs, M=precond, rtol=rtol, atol=0.0, restart=restart,
                    maxiter=maxiter, callback=_count,
                    callback_type="pr_norm")
    residual = np.linalg.norm(matrix @ x - rhs) / scale
    if info != 0 or residual > 10.0 * rtol:
        raise SolverError(
            f"GMRES did not converge (info={info}, relative residual "
            f"{residual:.3e} after {n_inner[0]} inner iterations)",
            residual=residual,
        )
    return x


def solve_dirichlet(grid, operators, uD, rtol=1e-10):
    """Solve S[mu] = uD; return density, traction and an off-surface evaluator.

    Warns (via the returned report) when the data violates the zero-flux
    compatibility condition <uD, n> beyond 1e-8.
    """
    import warnings

    slp, trac = operators
    uD = np.asarray(uD, dtype=float).reshape(-1, 3)
    flux = float(np.sum(grid.weights * np.sum(uD * grid.normals, axis=1)))
    scale = max(1.0, float(np.max(np.abs(uD))))
    if abs(flux) > 1e-8 * scale:
        warnings.warn(
            f"Dirichlet data has net flux {flux:.3e}; the single-layer "
            "representation requires compatible (zero-flux) data",
            stacklevel=2,
        )
    mu = _solve_gmres(completed_slp_matrix(slp), uD.ravel(), rtol=rtol)
    density = mu.reshape(-1, 3)
    traction = trac.apply(density)
    return density, traction, offsurface_evaluator(grid, density)


def offsurface_evaluator(grid, density):
    """Flow evaluator u(x) = sum_j w_j G(x - x_j) mu_j (off-surface only)."""
    weighted = grid.weights[:, None] * np.asarray(density, dtype=float)

    def evaluate(points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        r = pts[:, None, :] - grid.nodes[None, :, :]
        G = stokeslet_field(r)
        u = np.einsum("pnij,nj->pi", G, weighted)
        return u if np.asarray(points).ndim > 1 else u[0]

    return evaluate


@dataclass
class MixedSolution:
    density: np.ndarray  # (N, 3)
    rigid_coeffs: np.ndarray  # (6,) or zeros when no rigid unknowns
    traction: np.ndarray  # (N, 3)
    velocity: np.ndarray  # (N, 3), surface velocity S[mu]
    slip: np.ndarray  # (N, 3), velocity minus rigid part


def build_mixed_matrix(grid, operators, rigid_fields=None, constraints=None):
    """Square block matrix of the mixed tangential-traction/normal-velocity BVP.

    Rows: 2N tangential-traction rows in the per-node (t1, t2) frame, then
    N normal-velocity rows of the completed single layer, then one row per
    constraint.  Columns: 3N density unknowns, then one per rigid field.

    ``constraints`` entries are ``("force", k)`` for ``<f, u^R_k> = 0`` or
    ``("spin", k)`` for the slip-orthogonality row ``<v - v^R, u^R_k> = 0``.
    """
    slp, trac = operators
    N = grid.n_nodes
    n_rig = 0 if rigid_fields is None else len(rigid_fields)
    cons = [] if constraints is None else list(constraints)
    if len(cons) != n_rig:
        raise ValueError("need exactly one constraint row per rigid unknown")
    Kfull = trac.matrix
    Smat = completed_slp_matrix(slp)
    M = np.zeros((3 * N + n_rig, 3 * N + n_rig))
    # tangential traction rows, interleaved (t1, t2) per node
    T = np.zeros((2 * N, 3 * N))
    T[0::2] = _left_project(grid.t1, Kfull)
    T[1::2] = _left_project(grid.t2, Kfull)
    M[:2 * N, :3 * N] = T
    # normal velocity rows
    M[2 * N:3 * N, :3 * N] = _left_project(grid.normals, Smat)
    for j in range(n_rig):
        M[2 * N + np.arange(N), 3 * N + j] = -np.sum(
            grid.normals * rigid_fields[j], axis=1)
    # constraint rows
    for i, (kind, k) in enumerate(cons):
        row = 3 * N + i
        wu = (grid.weights[:, None] * rigid_fields[k]).ravel()
        if kind == "force":
            M[row, :3 * N] = wu @ Kfull
        elif kind == "spin":
            M[row, :3 * N] = wu @ slp.matrix
            for j in range(n_rig):
                M[row, 3 * N + j] = -float(
                    np.sum(grid.weights
                           * np.sum(rigid_fields[k] * rigid_fields[j], axis=1)))
        else:
            raise ValueError(f"unknown constraint kind {kind!r}")
    return M


def solve_mixed(grid, operators, tangential_data, normal_data=None,
                rigid_fields=None, constraints=None, rtol=1e-10):
    """Solve the mixed BVP; see :func:`build_mixed_matrix` for the layout.

    ``tangential_data`` is the prescribed tangential traction (N, 3);
    ``normal_data`` the prescribed normal velocity (N,), default zero.
    With rigid unknowns the normal condition reads
    ``n . (v - v^R) = normal_data``.
    """
    slp, trac = operators
    N = grid.n_nodes
    g = np.asarray(tangential_data, dtype=float).reshape(N, 3)
    n_rig = 0 if rigid_fields is None else len(rigid_fields)
    rhs = np.zeros(3 * N + n_rig)
    rhs[0:2 * N:2] = np.sum(g * grid.t1, axis=1)
    rhs[1:2 * N:2] = np.sum(g * grid.t2, axis=1)
    if normal_data is not None:
        rhs[2 * N:3 * N] = np.asarray(normal_data, dtype=float).reshape(N)
    M = build_mixed_matrix(grid, operators, rigid_fields, constraints)
    x = _solve_gmres(M, rhs, rtol=rtol)
    mu = x[:3 * N].reshape(N, 3)
    coeffs = np.zeros(6)
    vR = np.zeros((N, 3))
    for j in range(n_rig):
        coeffs[j] = x[3 * N + j]
        vR += coeffs[j] * rigid_fields[j]
    velocity = slp.apply(mu)
    return MixedSolution(
        density=mu,
        rigid_coeffs=coeffs,
        traction=trac.apply(mu),
        velocity=velocity,
        slip=velocity - vR,
    )


def _left_project(vectors, matrix):
    """Rows r_n = sum_i v_n[i] * matrix[3n+i, :] for per-node 3-vectors."""
    N = vectors.shape[0]
    blocks = matrix.reshape(N, 3, matrix.shape[1])
    return np.einsum("ni,nij->nj", vectors, blocks)
