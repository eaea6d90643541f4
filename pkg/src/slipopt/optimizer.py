"""Six-dimensional power-loss minimization over rigid motions.

The motion is parameterized as ``U = W + V``, ``Omega = s W`` with
``V . W = 0``.  For fixed net direction W the constrained quadratic in
``(s, V)`` has the closed-form solution

    s = -|W|^2 A_UO / D,
    V = (|W|^2 A_OO / D Z_UU^{-1} - s Z_UU^{-1} Z_UO - I) W,
    P_hat(W) = |W|^4 A_OO / D,

with the scalars ``A_UU = W^t Z_UU^{-1} W``, ``A_UO = W^t Z_UU^{-1} Z_UO W``,
``A_OO = W^t (Z_OO - Z_OU Z_UU^{-1} Z_UO) W`` and ``D = A_UU A_OO + A_UO^2``.
When ``A_UO = 0`` the solution degenerates to ``s = 0``,
``U = Z_UU^{-1} W / A_UU``, ``P_hat = 1/A_UU``, which is a physically
consistent straight motion only if W is an eigenvector of ``Z_UU^{-1}``.

The remaining minimization of ``P_hat`` over unit directions W uses its
closed-form gradient and multistart quasi-Newton descent on the
scale-invariant extension ``P_hat(x)/|x|^2`` (P_hat is homogeneous of
degree 2, so antipodal directions are equivalent).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .rigid_body import ResolutionError


@dataclass
class OptimalGait:
    W: np.ndarray
    s: float
    V: np.ndarray
    power: float
    consistent: bool
    classification: str
    near_degenerate: bool = False
    scalars: dict = field(default_factory=dict)
    stationarity_residual: float = np.nan
    slip: np.ndarray = None

    @property
    def U(self):
        return self.W + self.V

    @property
    def Omega(self):
        return self.s * self.W

    @property
    def alpha(self):
        return np.concatenate([self.U, self.Omega])


def _z_blocks(system_or_Z):
    Z = system_or_Z if isinstance(system_or_Z, np.ndarray) \
        else system_or_Z.Z
    Z = np.asarray(Z, dtype=float)
    return Z, Z[:3, :3], Z[:3, 3:], Z[3:, 3:]


def _partial_scalars(Z_UU, Z_UO, Z_OO, W):
    Zuu_inv = np.linalg.inv(Z_UU)
    M = Zuu_inv @ Z_UO
    schur = Z_OO - Z_UO.T @ M
    A_UU = float(W @ Zuu_inv @ W)
    A_UO = float(W @ M @ W)
    A_OO = float(W @ schur @ W)
    D = A_UU * A_OO + A_UO**2
    return Zuu_inv, M, schur, A_UU, A_UO, A_OO, D


def _classify(s, V, w2, s_tol=1e-10, v_tol=1e-10):
    if abs(s) * np.sqrt(w2) < s_tol:
        return "pure-translation"
    if np.linalg.norm(V) < v_tol:
        return "spinning-straight"
    return "helical"


def partial_minimize(system, W, degenerate_tol=1e-10):
    """Closed-form minimum-power motion with net direction W fixed."""
    W = np.asarray(W, dtype=float)
    w2 = float(W @ W)
    if w2 == 0.0:
        raise ValueError("net direction W must be nonzero")
    Z, Z_UU, Z_UO, Z_OO = _z_blocks(system)
    Zuu_inv, M, schur, A_UU, A_UO, A_OO, D = _partial_scalars(
        Z_UU, Z_UO, Z_OO, W)
    scale = np.linalg.norm(Z, 2)
    scalars = {"A_UU": A_UU, "A_UO": A_UO, "A_OO": A_OO, "D": D}
    if abs(A_UO) <= degenerate_tol * scale * w2:
        # straight-motion branch: s = 0, U = Z_UU^{-1} W / A_UU
        if A_UU <= 0.0:
            raise ResolutionError("Z_UU is not positive definite")
        U = w2 * (Zuu_inv @ W) / A_UU
        resid = np.linalg.norm(Zuu_inv @ W - (A_UU / w2) * W)
        consistent = resid <= 1e-8 * np.linalg.norm(Zuu_inv @ W)
        V = np.zeros(3) if consistent else U - W
        gait = OptimalGait(W=W.copy(), s=0.0, V=V, power=w2**2 / A_UU,
                           consistent=consistent,
                           classification="pure-translation",
                           scalars=scalars)
        gait.near_degenerate = not consistent
        return gait
    if D <= 0.0:
        raise ResolutionError(
            f"partial minimization scalar D = {D:.3e} <= 0; "
            "the reduction matrix is not SPD")
    s = -w2 * A_UO / D
    V = (w2 * A_OO / D) * (Zuu_inv @ W) - s * (M @ W) - W
    power = w2**2 * A_OO / D
    gait = OptimalGait(W=W.copy(), s=s, V=V, power=power, consistent=True,
                       classification=_classify(s, V, w2), scalars=scalars)
    # physically dubious limits flagged per the small-s discussion
    helix_radius = np.linalg.norm(V) / max(abs(s) * np.sqrt(w2), 1e-300)
    gait.near_degenerate = abs(s) < 1e-6 or helix_radius > 1e6
    return gait


def brute_force_partial(system, W):
    """Independent oracle for the fixed-W minimization.

    Minimizes the quadratic power in the three free variables
    ``(s, c1, c2)`` with ``V = c1 E1 + c2 E2`` in an orthonormal basis of
    the plane orthogonal to W, by solving the normal equations directly.
    """
    W = np.asarray(W, dtype=float)
    _, Z_UU, Z_UO, Z_OO = _z_blocks(system)
    # orthonormal basis of the plane orthogonal to W
    _, _, vh = np.linalg.svd(W.reshape(1, 3))
    E = vh[1:].T
    Q = np.zeros((3, 3))
    Q[0, 0] = W @ Z_OO @ W
    Q[1:, 0] = Q[0, 1:] = E.T @ Z_UO @ W
    Q[1:, 1:] = E.T @ Z_UU @ E
    b = np.concatenate([[W @ Z_UO @ W], E.T @ Z_UU @ W])
    x = np.linalg.solve(Q, -b)
    s, c = x[0], x[1:]
    V = E @ c
    U = W + V
    Omega = s * W
    alpha = np.concatenate([U, Omega])
    Z = np.block([[Z_UU, Z_UO], [Z_UO.T, Z_OO]])
    return s, V, float(alpha @ Z @ alpha)


def spinning_straight(system, W):
    """Best spinning-or-straight motion (V = 0) along W."""
    W = np.asarray(W, dtype=float)
    _, Z_UU, Z_UO, Z_OO = _z_blocks(system)
    B_UU = float(W @ Z_UU @ W)
    B_UO = float(W @ Z_UO @ W)
    B_OO = float(W @ Z_OO @ W)
    s_b = -B_UO / B_OO
    P_b = B_UU - B_UO**2 / B_OO
    return s_b, P_b


def rotationless_optimal(system):
    """Smallest-eigenvalue direction of Z_UU: the best straight motion."""
    _, Z_UU, _, _ = _z_blocks(system)
    vals, vecs = np.linalg.eigh(Z_UU)
    return vecs[:, 0].copy(), float(vals[0])


def power_gradient(system, W):
    """Gradient of P_hat at W (closed form, used by the global search)."""
    W = np.asarray(W, dtype=float)
    w2 = float(W @ W)
    _, Z_UU, Z_UO, Z_OO = _z_blocks(system)
    Zuu_inv, M, schur, A_UU, A_UO, A_OO, D = _partial_scalars(
        Z_UU, Z_UO, Z_OO, W)
    grad = (w2**2 / D**2) * (
        2.0 * A_UO**2 * (schur @ W)
        - 2.0 * A_OO**2 * (Zuu_inv @ W)
        - 2.0 * A_OO * A_UO * ((M + M.T) @ W)
    )
    grad += (4.0 * w2 * A_OO / D) * W
    return grad


def _multistart_seeds(count, rng=None):
    """Deterministic direction seeds: axes + face/edge/corner lattice."""
    base = []
    for v in np.ndindex(3, 3, 3):
        d = np.array(v, dtype=float) - 1.0
        if np.any(d):
            base.append(d / np.linalg.norm(d))
    seeds = base[:count]
    if count > len(base):
        rng = np.random.default_rng(0) if rng is None else rng
        extra = rng.normal(size=(count - len(base), 3))
        seeds += list(extra / np.linalg.norm(extra, axis=1)[:, None])
    return seeds


def global_minimize(system, multistart_count=26, stationarity_tol=1e-8):
    """Minimize P_hat over unit net directions (multistart quasi-Newton).

    Descends on the degree-0 homogeneous objective ``P_hat(x) / |x|^2``
    over R^3, which removes the unit-norm constraint; results are reported
    with |W| = 1.  The returned optimum satisfies the first-order condition
    ``grad P_hat(W) = 2 P_hat(W) W`` below ``stationarity_tol`` and is
    checked against the eigenvector condition that any stationary W with
    ``A_UO(W) = 0`` must satisfy.
    """

    def fun(x):
        x2 = float(x @ x)
        return partial_minimize(system, x).power / x2

    def jac(x):
        x2 = float(x @ x)
        P = partial_minimize(system, x).power
        return (power_gradient(system, x) - 2.0 * P * x / x2) / x2

    best = None
    failures = []
    for seed in _multistart_seeds(multistart_count):
        res = minimize(fun, seed, jac=jac, method="BFGS",
                       options={"gtol": 1e-12, "maxiter": 200})
        W = res.x / np.linalg.norm(res.x)
        gait = partial_minimize(system, W)
        resid = np.linalg.norm(power_gradient(system, W) - 2.0 * gait.power * W)
        if resid > stationarity_tol * max(1.0, abs(gait.power)):
            failures.append(resid)
            continue
        gait.stationarity_residual = resid
        if best is None or _better(gait, best):
            best = gait
    if best is None:
        raise ResolutionError(
            "no multistart descent reached a stationary point "
            f"(best residuals {sorted(failures)[:3]})")
    _check_eigenvector_condition(system, best)
    # canonical sign: (W, s, V) and (-W, s, -V) describe the same motion
    for comp in best.W:
        if abs(comp) > 1e-12:
            if comp < 0:
                best.W = -best.W
                best.V = -best.V
            break
    best.slip = _slip_field(system, best)
    return best


def _better(a, b):
    if abs(a.power - b.power) > 1e-12 * max(abs(a.power), abs(b.power)):
        return a.power < b.power
    # tie: lexicographically smallest W with nonnegative leading component
    return tuple(_canonical_W(a.W)) < tuple(_canonical_W(b.W))


def _canonical_W(W):
    for comp in W:
        if abs(comp) > 1e-12:
            return W if comp > 0 else -W
    return W


def _check_eigenvector_condition(system, gait):
    """Any stationary W with A_UO(W) = 0 must be a Z_UU^{-1} eigenvector."""
    Z, Z_UU, _, _ = _z_blocks(system)
    if abs(gait.scalars["A_UO"]) > 1e-8 * np.linalg.norm(Z, 2):
        return
    Zuu_inv = np.linalg.inv(Z_UU)
    v = Zuu_inv @ gait.W
    resid = np.linalg.norm(v - (gait.W @ v) * gait.W)
    if resid > 1e-6 * np.linalg.norm(v):
        gait.consistent = False
        gait.scalars["eigenvector_anomaly"] = float(resid)


def _slip_field(system, gait):
    if not hasattr(system, "slip_for_alpha"):
        return None
    return system.slip_for_alpha(gait.alpha)
