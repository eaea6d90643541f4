"""Rigid-motion kinematics: net velocity, helix geometry, path integration.

A motion with constant body-frame velocities (U, Omega) traces a helix
about an axis parallel to Omega.  The net (axis) velocity is
``W = (U.Omega/|Omega|^2) Omega`` when Omega is nonzero, and ``W = U``
for a straight motion; the transverse component V circles the axis with
radius ``|V|/|s W|``, pitch ``2 pi / |s|`` and period ``2 pi / |s W|``
(with ``Omega = s W``).

Orientation is stored as a unit quaternion, renormalized every step of
the 4th-order integrator.
"""

import csv
from dataclasses import dataclass

import numpy as np


def net_velocity(U, Omega, tol=1e-12):
    """Net (axis-parallel) velocity W and the motion classification."""
    U = np.asarray(U, dtype=float)
    Omega = np.asarray(Omega, dtype=float)
    scale = max(np.linalg.norm(U), np.linalg.norm(Omega), 1.0)
    if np.linalg.norm(Omega) <= tol * scale:
        return U.copy(), "pure-translation"
    W = (float(U @ Omega) / float(Omega @ Omega)) * Omega
    if np.linalg.norm(W) <= tol * scale:
        return W, "circular"
    if np.linalg.norm(np.cross(U, Omega)) <= tol * scale**2:
        return W, "spinning-straight"
    return W, "helical"


@dataclass
class HelixGeometry:
    radius: float
    pitch: float
    period: float
    axis: np.ndarray
    near_degenerate: bool = False


def helix_geometry(s, V, W):
    """Helix descriptors of the motion U = W + V, Omega = s W."""
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    w = np.linalg.norm(W)
    v = np.linalg.norm(V)
    axis = W / w if w > 0 else W
    if s == 0.0:
        return HelixGeometry(radius=np.inf if v > 0 else 0.0,
                             pitch=np.inf, period=np.inf, axis=axis,
                             near_degenerate=v > 0)
    return HelixGeometry(
        radius=v / abs(s * w) if w > 0 else np.inf,
        pitch=2.0 * np.pi / abs(s),
        period=2.0 * np.pi / abs(s * w) if w > 0 else np.inf,
        axis=axis,
    )


def _quat_multiply(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def quaternion_to_matrix(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def integrate_path(U_body, Omega_body, T, dt):
    """RK4 integration of ``x' = R U_body``, ``R' = R [Omega_body]x``.

    Returns ``(times, positions, quaternions)`` sampled at every step,
    starting from the identity orientation at the origin.
    """
    if dt <= 0 or T <= 0:
        raise ValueError("need positive duration and step")
    U_body = np.asarray(U_body, dtype=float)
    Omega_body = np.asarray(Omega_body, dtype=float)
    n = int(np.ceil(T / dt))
    omega_quat = np.concatenate([[0.0], Omega_body])

    def deriv(state):
        x, q = state[:3], state[3:]
        dq = 0.5 * _quat_multiply(q, omega_quat)
        dx = quaternion_to_matrix(q) @ U_body
        return np.concatenate([dx, dq])

    state = np.concatenate([np.zeros(3), [1.0, 0.0, 0.0, 0.0]])
    times = np.empty(n + 1)
    positions = np.empty((n + 1, 3))
    quaternions = np.empty((n + 1, 4))
    t = 0.0
    for i in range(n + 1):
        times[i] = t
        positions[i] = state[:3]
        quaternions[i] = state[3:]
        if i == n:
            break
        h = min(dt, T - t)
        k1 = deriv(state)
        k2 = deriv(state + 0.5 * h * k1)
        k3 = deriv(state + 0.5 * h * k2)
        k4 = deriv(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        state[3:] /= np.linalg.norm(state[3:])
        t += h
    return times, positions, quaternions


def analytic_helix(s, V, W, times):
    """Closed-form centroid path of the motion U = W + V, Omega = s W.

    Valid from the identity orientation: the axis-parallel part advances
    as ``W t`` while V precesses about the axis at rate ``|s W|``.
    """
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    times = np.asarray(times, dtype=float)
    Omega = s * W
    omega = np.linalg.norm(Omega)
    if omega == 0.0:
        return times[:, None] * (W + V)[None, :]
    axis = Omega / omega
    wt = omega * times
    return (times[:, None] * W[None, :]
            + (np.sin(wt) / omega)[:, None] * V[None, :]
            + ((1.0 - np.cos(wt)) / omega)[:, None]
            * np.cross(axis, V)[None, :])


def write_path_csv(path, times, positions, quaternions):
    """CSV export: one row (t, x, y, z, qw, qx, qy, qz) per sample."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "y", "z", "qw", "qx", "qy", "qz"])
        for t, x, q in zip(times, positions, quaternions):
            writer.writerow([f"{t:.17g}", *(f"{c:.17g}" for c in x),
                             *(f"{c:.17g}" for c in q)])


def write_path_vtk(path, positions):
    """Legacy-VTK polyline export of a centroid path."""
    positions = np.asarray(positions, dtype=float)
    n = positions.shape[0]
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("swimmer centroid path\nASCII\nDATASET POLYDATA\n")
        fh.write(f"POINTS {n} double\n")
        for x in positions:
            fh.write(f"{x[0]:.17g} {x[1]:.17g} {x[2]:.17g}\n")
        fh.write(f"LINES 1 {n + 1}\n")
        fh.write(" ".join([str(n)] + [str(i) for i in range(n)]) + "\n")
