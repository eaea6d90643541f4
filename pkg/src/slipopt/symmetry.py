"""Shape symmetry detection and the induced sparsity of C, A, C^{-1}, Z.

Reflections across coordinate planes, the quarter-turn about e3 and full
rotational invariance about e3 each force a predictable set of entries of
the 6x6 resistance and reduction matrices to vanish; the dihedral and
axisymmetric classes additionally tie the nonzero entries together
(C22 = C11, C55 = C44, C24 = -C15) and give closed-form inverses.  The
symmetry is detected from the shape alone by radial sampling, and the
matrix patterns are verified separately: disagreement isolates a solver
bug rather than a geometry bug.

Only coordinate-aligned planes and the e3 axis are tested; shapes are
expected in the symmetry-adapted frame.
"""

from dataclasses import dataclass, field

import numpy as np

# parity of the six rigid fields under the reflection across x_d = 0
# (d = 0,1,2): translations flip when aligned with the normal, rotations
# (axial vectors) flip when orthogonal to it.
_REFLECTIONS = ("s1", "s2", "s3")


def _rigid_parities(d):
    par = np.empty(6)
    for i in range(3):
        par[i] = -1.0 if i == d else 1.0
        par[i + 3] = 1.0 if i == d else -1.0
    return par


def _direction_angles(u):
    theta = np.arccos(np.clip(u[:, 2], -1.0, 1.0))
    phi = np.arctan2(u[:, 1], u[:, 0])
    return theta, phi


_ISOMETRY_MATRICES = {
    "s1": np.diag([-1.0, 1.0, 1.0]),
    "s2": np.diag([1.0, -1.0, 1.0]),
    "s3": np.diag([1.0, 1.0, -1.0]),
    "quarter_turn": np.array([[0.0, -1.0, 0.0],
                              [1.0, 0.0, 0.0],
                              [0.0, 0.0, 1.0]]),
}


def _sample_directions(samples, rng_seed=7):
    # deterministic quasi-random directions avoiding poles and symmetry
    # planes, so an accidental zero never masks an asymmetry
    rng = np.random.default_rng(rng_seed)
    u = rng.normal(size=(samples, 3))
    return u / np.linalg.norm(u, axis=1)[:, None]


def detect_shape_symmetry(shape, samples=200, tol=1e-10):
    """Isometries of the shape among {s1, s2, s3, quarter_turn, axisymmetric}.

    Tests invariance of the radial map by sampling: an isometry S is kept
    when ``r(S u) = r(u)`` for every sampled direction u within ``tol``.
    Axisymmetry is tested with irrational-angle rotations about e3.
    """
    u = _sample_directions(samples)
    theta, phi = _direction_angles(u)
    r0, _, _ = shape.radius(theta, phi)
    scale = np.abs(r0).max()
    found = []
    for name, S in _ISOMETRY_MATRICES.items():
        th, ph = _direction_angles(u @ S.T)
        r1, _, _ = shape.radius(th, ph)
        if np.abs(r1 - r0).max() < tol * scale:
            found.append(name)
    axi = True
    for dphi in (np.sqrt(2.0), np.exp(1.0) / 3.0, 0.5):
        r1, _, _ = shape.radius(theta, phi + dphi)
        if np.abs(r1 - r0).max() >= tol * scale:
            axi = False
            break
    if axi:
        found.append("axisymmetric")
    return found


def classify_isometries(isometries):
    """Symmetry class and the reflection planes it rests on.

    Returns ``(cls, planes)`` with ``cls`` in {none, S1, S2, S3, D, A} and
    ``planes`` the 0-based coordinate indices of detected mirror planes.
    """
    planes = tuple(d for d, name in enumerate(_REFLECTIONS)
                   if name in isometries)
    if "axisymmetric" in isometries:
        return "A", planes
    if "quarter_turn" in isometries and 0 in planes and 1 in planes:
        return "D", planes
    if len(planes) == 3:
        return "S3", planes
    if len(planes) == 2:
        return "S2", planes
    if len(planes) == 1:
        return "S1", planes
    return "none", planes


def pattern_mask(cls, planes=()):
    """Boolean 6x6 mask of entries forced to vanish by the symmetry class."""
    if cls == "none":
        return np.zeros((6, 6), dtype=bool)
    if cls in ("D", "A"):
        planes = (0, 1)
    elif cls == "S3":
        planes = (0, 1, 2)
    elif not planes:
        raise ValueError(f"class {cls!r} needs its reflection plane indices")
    mask = np.zeros((6, 6), dtype=bool)
    for d in planes:
        par = _rigid_parities(d)
        mask |= np.outer(par, par) < 0
    return mask


@dataclass
class PatternCheck:
    matrix_name: str
    cls: str
    residual: float  # max |predicted-zero entry| / max |entry|
    relation_residuals: dict = field(default_factory=dict)
    passed: bool = True


def verify_matrix_pattern(matrix, cls, planes=(), name="matrix",
                          is_inverse=False, tol=1e-6):
    """Check the predicted-zero pattern (and D/A entry relations).

    For classes D and A the dihedral links C22 = C11, C55 = C44 and
    C24 = -C15 are checked, and the closed-form inverse relations
    a' = -e/(b^2 - e a), b' = b/(b^2 - e a), c' = 1/c, d' = 1/d,
    e' = -a/(b^2 - e a) are verified against the actual inverse (they
    apply identically whether the matrix is C/A or their inverse).
    """
    M = np.asarray(matrix, dtype=float)
    if M.shape != (6, 6):
        raise ValueError("expected a 6x6 matrix")
    mask = pattern_mask(cls, planes)
    norm = np.abs(M).max()
    residual = float(np.abs(M[mask]).max() / norm) if mask.any() else 0.0
    relations = {}
    if cls in ("D", "A"):
        relations["C22-C11"] = abs(M[1, 1] - M[0, 0]) / norm
        relations["C55-C44"] = abs(M[4, 4] - M[3, 3]) / norm
        relations["C24+C15"] = abs(M[1, 3] + M[0, 4]) / norm
        a, b, c = M[0, 0], M[0, 4], M[2, 2]
        e, d = M[3, 3], M[5, 5]
        det = b * b - e * a
        inv = np.linalg.inv(M)
        inv_norm = np.abs(inv).max()
        predicted = {"a'": -e / det, "b'": b / det, "c'": 1.0 / c,
                     "d'": 1.0 / d, "e'": -a / det}
        actual = {"a'": inv[0, 0], "b'": inv[0, 4], "c'": inv[2, 2],
                  "d'": inv[5, 5], "e'": inv[3, 3]}
        for key in predicted:
            relations[key] = abs(predicted[key] - actual[key]) / inv_norm
    passed = residual < tol and all(v < tol for v in relations.values())
    return PatternCheck(matrix_name=name, cls=cls, residual=residual,
                        relation_residuals=relations, passed=passed)


@dataclass
class SymmetryReport:
    isometries: tuple
    classification: str
    planes: tuple
    checks: dict = field(default_factory=dict)  # name -> PatternCheck

    @property
    def pattern_residual(self):
        if not self.checks:
            return 0.0
        return max(c.residual for c in self.checks.values())

    def to_dict(self):
        return {
            "isometries": list(self.isometries),
            "classification": self.classification,
            "planes": list(self.planes),
            "checks": {
                name: {
                    "residual": c.residual,
                    "relation_residuals": dict(c.relation_residuals),
                    "passed": bool(c.passed),
                }
                for name, c in self.checks.items()
            },
        }


def build_symmetry_report(shape, matrices=None, samples=200, tol=1e-6):
    """Detect symmetries and verify the induced patterns on given matrices.

    ``matrices`` maps names (e.g. "C", "A", "Z") to 6x6 arrays; each gets
    a :class:`PatternCheck` under the detected class.
    """
    isometries = tuple(detect_shape_symmetry(shape, samples=samples))
    cls, planes = classify_isometries(isometries)
    checks = {}
    if matrices and cls != "none":
        for name, M in matrices.items():
            checks[name] = verify_matrix_pattern(M, cls, planes, name=name,
                                                 tol=tol)
    return SymmetryReport(isometries=isometries, classification=cls,
                          planes=planes, checks=checks)


def check_prop_symmetry_consequences(report, gait, tol=1e-6):
    """Consequences of symmetry on the globally optimal motion.

    Classes A and S3 force the optimum to be rotationless with W in a
    symmetry plane; in classes S1/S2 an optimum lying in a detected mirror
    plane must be rotationless if consistent.  Returns structured findings
    (never raises).
    """
    findings = []
    W = np.asarray(gait.W, dtype=float)
    Omega = np.asarray(gait.Omega, dtype=float)
    w_norm = max(np.linalg.norm(W), 1e-300)
    if report.classification in ("A", "S3"):
        findings.append({
            "check": "rotationless",
            "value": float(np.linalg.norm(Omega)),
            "passed": bool(np.linalg.norm(Omega) < tol),
        })
        if report.classification == "S3":
            # W must lie in a coordinate plane (some component vanishes)
            dist = float(np.abs(W).min() / w_norm)
        else:
            # every direction lies in a plane containing the symmetry axis
            dist = 0.0
        findings.append({
            "check": "W-in-symmetry-plane",
            "value": dist,
            "passed": bool(dist < tol),
        })
    elif report.classification in ("S1", "S2", "D"):
        planes = (0, 1) if report.classification == "D" else report.planes
        in_plane = [d for d in planes if abs(W[d]) / w_norm < tol]
        if in_plane:
            findings.append({
                "check": "rotationless-in-plane",
                "value": float(np.linalg.norm(Omega)),
                "passed": bool(np.linalg.norm(Omega) < tol
                               or not gait.consistent),
            })
        else:
            findings.append({
                "check": "rotationless-in-plane",
                "value": None,
                "passed": True,  # vacuous: W off all mirror planes
            })
    return {
        "classification": report.classification,
        "findings": findings,
        "passed": all(f["passed"] for f in findings),
    }
