"""Reduced 6-solve optimal-gait pipeline for bodies of revolution.

For a shape axisymmetric about the x3 axis the spin field ``e3 x x`` is
tangential, every optimal motion is rotationless, and the dihedral
sparsity of C and A leaves only four independent entries of each.  Three
Dirichlet solves (translations along e1, e3 and the rotation about e1)
and three modified mixed solves then determine Z11, Z33, Z15 and the two
candidate optimal slips; the optimum is axial when Z33 <= Z11 and
transverse otherwise.

Fields related by the quarter-turn about e3 are evaluated by an exact
azimuthal index shift of the grid (p must be even), so no interpolation
error enters the rotated pairings.
"""

from dataclasses import dataclass

import numpy as np

from .bie import assemble_operators, solve_dirichlet, solve_mixed
from .grid import surface_scalar_product
from .reduction import tangential_part
from .rigid_body import (ResolutionError, rigid_basis,
                         tangential_rigid_directions)
from .symmetry import detect_shape_symmetry

_QUARTER_TURN = np.array([[0.0, -1.0, 0.0],
                          [1.0, 0.0, 0.0],
                          [0.0, 0.0, 1.0]])


class ModeMismatchError(ValueError):
    """The axisymmetric pipeline was invoked on an unsuitable shape/grid."""


def quarter_turn_field(grid, field):
    """The rotated field ``r F(r^-1 x)`` for the +90-degree turn about e3.

    Acts by an exact azimuthal index shift (the 2p-point azimuth grid
    contains the quarter turn when p is even) plus component rotation.
    """
    if grid.p % 2:
        raise ModeMismatchError(
            "quarter-turn fields need an even grid degree p")
    field = np.asarray(field, dtype=float)
    nphi = len(grid.phi)
    values = field.reshape(len(grid.theta), nphi, 3)
    shifted = np.roll(values, nphi // 4, axis=1)
    return (shifted @ _QUARTER_TURN.T).reshape(field.shape)


@dataclass
class AxisymGait:
    Z11: float
    Z33: float
    Z15: float
    C11: float
    C33: float
    C44: float
    C15: float
    A11: float
    A33: float
    A44: float
    A15: float
    y1: np.ndarray  # (N, 3) optimal slip of transverse motion
    y3: np.ndarray  # (N, 3) optimal slip of axial motion
    W_star: np.ndarray
    P_star: float
    degenerate: bool
    spin_residual: float

    @property
    def slip(self):
        return self.y3 if self.W_star[2] else self.y1

    @property
    def classification(self):
        return "axial" if self.W_star[2] else "transverse"

    def to_dict(self):
        return {
            "Z11": self.Z11, "Z33": self.Z33, "Z15": self.Z15,
            "C11": self.C11, "C33": self.C33,
            "C44": self.C44, "C15": self.C15,
            "W_star": self.W_star.tolist(), "P_star": self.P_star,
            "degenerate": self.degenerate,
            "classification": self.classification,
            "spin_residual": self.spin_residual,
        }


def _require_axisymmetric(grid):
    if grid.p % 2:
        raise ModeMismatchError("axisym mode requires an even grid degree p")
    if "axisymmetric" not in detect_shape_symmetry(grid.shape):
        raise ModeMismatchError(
            "shape is not axisymmetric about the x3 axis")


def axisym_optimize(grid, operators=None, degenerate_tol=1e-8):
    """Optimal gait of an axisymmetric swimmer from six flow solves."""
    _require_axisymmetric(grid)
    if operators is None:
        operators = assemble_operators(grid)
    basis = rigid_basis(grid)
    # three Dirichlet solves: translations e1, e3 and rotation about e1
    fR = {}
    for l in (0, 2, 3):
        _, fR[l], _ = solve_dirichlet(grid, operators, basis[l])
    sp = lambda f, g: surface_scalar_product(grid, f, g)
    rot = lambda f: quarter_turn_field(grid, f)
    C11 = sp(fR[0], basis[0])
    C33 = sp(fR[2], basis[2])
    C44 = sp(fR[3], basis[3])
    C15 = sp(fR[0], rot(basis[3]))
    D_C = C15**2 - C11 * C44
    # extractor tractions from the 2x2 resistance blocks (1,5) and (2,4)
    f_alpha = {
        0: (C44 * fR[0] - C15 * rot(fR[3])) / D_C,
        2: -fR[2] / C33,
        3: (C15 * rot(fR[0]) + C11 * fR[3]) / D_C,
    }
    # three mixed solves restricted to the spin-free slip space; on a
    # sphere all three rotations are tangential and get the same treatment
    degenerate_dirs = tangential_rigid_directions(grid, basis)
    constraints = [("spin", k) if k in degenerate_dirs else ("force", k)
                   for k in range(6)]
    z, f = {}, {}
    for i in (0, 2, 3):
        g = tangential_part(grid, f_alpha[i])
        if i in degenerate_dirs:
            g = g + basis[i] / sp(basis[i], basis[i])
        sol = solve_mixed(grid, operators, g,
                          rigid_fields=basis, constraints=constraints)
        z[i], f[i] = sol.slip, sol.traction
    A11 = sp(f[0], z[0])
    A33 = sp(f[2], z[2])
    A44 = sp(f[3], z[3])
    A15 = sp(f[0], rot(z[3]))
    # invert the coupled (translation-1, rotation-2) block on its range;
    # the rotational row/column vanishes on a sphere (unreachable motion)
    B = np.array([[A11, A15], [A15, A44]])
    B_inv = np.linalg.pinv(B, rcond=1e-10, hermitian=True)
    Z11 = B_inv[0, 0]
    Z33 = 1.0 / A33
    Z15 = B_inv[0, 1]
    if Z11 <= 0.0 or Z33 <= 0.0:
        raise ResolutionError(
            f"computed mobilities not positive (Z11={Z11:.3e}, "
            f"Z33={Z33:.3e}); refine the grid")
    y1 = Z11 * z[0] + Z15 * rot(z[3])
    y3 = Z33 * z[2]
    degenerate = abs(Z11 - Z33) <= degenerate_tol * max(Z11, Z33)
    if degenerate or Z33 <= Z11:
        W_star, P_star, uS = np.array([0.0, 0.0, 1.0]), Z33, y3
    else:
        W_star, P_star, uS = np.array([1.0, 0.0, 0.0]), Z11, y1
    spin = basis[5]
    spin_residual = abs(sp(uS, spin)) / np.sqrt(
        sp(uS, uS) * sp(spin, spin))
    return AxisymGait(Z11=Z11, Z33=Z33, Z15=Z15, C11=C11, C33=C33,
                      C44=C44, C15=C15, A11=A11, A33=A33, A44=A44, A15=A15,
                      y1=y1, y3=y3, W_star=W_star, P_star=P_star,
                      degenerate=degenerate, spin_residual=spin_residual)


def axisym_partial_minimize(gait, W):
    """Closed-form fixed-direction minimum for an axisymmetric swimmer.

    Returns ``(U, P_hat)``; the motion is always rotationless.
    """
    W = np.asarray(W, dtype=float)
    A_UU = (W[0]**2 + W[1]**2) / gait.Z11 + W[2]**2 / gait.Z33
    U = np.array([W[0] / gait.Z11, W[1] / gait.Z11, W[2] / gait.Z33]) / A_UU
    w2 = float(W @ W)
    return U * w2, w2**2 / A_UU


def cross_check_general(grid, operators=None, rtol=1e-5):
    """Compare the 6-solve pipeline with the general 12-solve one.

    Runs both on the same grid and reports Z11, Z33, the optimal power and
    the motion class from each, with relative differences against ``rtol``.
    """
    from .reduction import build_gait_system
    from .rigid_body import assemble_rigid_system

    _require_axisymmetric(grid)
    if operators is None:
        operators = assemble_operators(grid)
    axi = axisym_optimize(grid, operators)
    rigid = assemble_rigid_system(grid, operators)
    system = build_gait_system(grid, operators, rigid, mode="axisym")
    Z11_g = system.Z[0, 0]
    Z33_g = system.Z[2, 2]
    P_g = min(Z11_g, Z33_g)
    class_g = "axial" if Z33_g <= Z11_g else "transverse"
    diffs = {
        "Z11": abs(axi.Z11 - Z11_g) / abs(Z11_g),
        "Z33": abs(axi.Z33 - Z33_g) / abs(Z33_g),
        "P_star": abs(axi.P_star - P_g) / abs(P_g),
    }
    return {
        "axisym": {"Z11": axi.Z11, "Z33": axi.Z33, "P_star": axi.P_star,
                   "class": axi.classification},
        "general": {"Z11": Z11_g, "Z33": Z33_g, "P_star": P_g,
                    "class": class_g},
        "relative_differences": diffs,
        "classes_agree": axi.degenerate or axi.classification == class_g,
        "agrees": (max(diffs.values()) < rtol
                   and (axi.degenerate or axi.classification == class_g)),
    }
