import numpy as np
import numpy.testing as npt
import pytest

from slipopt.shapes import ShapeSpec, sphere, tilted_dumbbell
from slipopt.symmetry import (build_symmetry_report,
                              check_prop_symmetry_consequences,
                              classify_isometries, detect_shape_symmetry,
                              pattern_mask, verify_matrix_pattern)


def test_sphere_has_all_isometries():
    iso = detect_shape_symmetry(sphere())
    assert set(iso) == {"s1", "s2", "s3", "quarter_turn", "axisymmetric"}
    assert classify_isometries(iso)[0] == "A"


def test_spheroid_is_axisymmetric():
    sh = ShapeSpec(kind="spheroid", semi_axes=(1.0, 1.0, 0.5))
    iso = detect_shape_symmetry(sh)
    assert set(iso) == {"s1", "s2", "s3", "quarter_turn", "axisymmetric"}


def test_dumbbell_has_one_mirror_plane():
    iso = detect_shape_symmetry(tilted_dumbbell())
    assert "axisymmetric" not in iso
    assert iso == ["s2"]
    assert classify_isometries(iso) == ("S1", (1,))


def test_chiral_shape_has_no_symmetry():
    from slipopt.shapes import chiral_helical_shape

    iso = detect_shape_symmetry(chiral_helical_shape())
    assert iso == []
    assert classify_isometries(iso)[0] == "none"


def test_pattern_masks():
    # three mirror planes force a diagonal matrix
    assert (~pattern_mask("S3")).sum() == 6
    # single x3 = 0 plane: translations 1,2 and rotation 6 decouple from
    # translation 3 and rotations 4,5
    m = pattern_mask("S1", planes=(2,))
    even = [0, 1, 5]
    odd = [2, 3, 4]
    for k in even:
        for l in odd:
            assert m[k, l] and m[l, k]
        for l in even:
            assert not m[k, l]
    assert not pattern_mask("none").any()
    with pytest.raises(ValueError):
        pattern_mask("S1")  # plane id required


def test_diagonal_matrix_passes_s3():
    check = verify_matrix_pattern(np.diag([1.0, 2, 3, 4, 5, 6]), "S3")
    assert check.passed and check.residual == 0.0


def test_axisym_pattern_and_inverse_relations():
    a, b, c, d, e = 2.0, 0.3, 1.5, 0.8, 1.1
    M = np.diag([a, a, c, e, e, d])
    M[0, 4] = M[4, 0] = b
    M[1, 3] = M[3, 1] = -b
    check = verify_matrix_pattern(M, "A")
    assert check.passed
    det = b * b - e * a
    npt.assert_allclose(np.linalg.inv(M)[0, 0], -e / det, rtol=1e-12)


def test_pattern_violation_detected():
    M = np.diag([1.0, 1, 1, 1, 1, 1])
    M[0, 2] = M[2, 0] = 0.5  # forbidden under any mirror class
    check = verify_matrix_pattern(M, "S3")
    assert not check.passed
    assert check.residual == 0.5


def test_computed_matrices_match_pattern(dumbbell_pipeline):
    rep = build_symmetry_report(
        dumbbell_pipeline.shape,
        {"C": dumbbell_pipeline.rigid.C, "A": dumbbell_pipeline.system.A})
    assert rep.classification == "S1"
    assert rep.pattern_residual < 1e-6
    assert rep.to_dict()["checks"]["C"]["passed"]


def test_asymmetric_perturbation_breaks_pattern():
    # mirror-asymmetric shape: the S1 x2-plane pattern must fail clearly
    M = np.arange(36, dtype=float).reshape(6, 6)
    M = M + M.T + 40 * np.eye(6)
    check = verify_matrix_pattern(M, "S1", planes=(1,))
    assert check.residual > 1e-3


def test_prop_consequences_s3():
    from slipopt.optimizer import OptimalGait

    report = build_symmetry_report(
        ShapeSpec(kind="spheroid", semi_axes=(1.0, 1.0, 0.5)))
    gait = OptimalGait(W=np.array([1.0, 0, 0]), s=0.0, V=np.zeros(3),
                       power=1.0, consistent=True,
                       classification="pure-translation")
    out = check_prop_symmetry_consequences(report, gait)
    assert out["passed"]
    spinning = OptimalGait(W=np.array([1.0, 0, 0]), s=0.5,
                           V=np.zeros(3), power=1.0, consistent=True,
                           classification="spinning-straight")
    out = check_prop_symmetry_consequences(report, spinning)
    assert not out["passed"]


def test_prop_consequences_vacuous_off_plane():
    from slipopt.optimizer import OptimalGait
    from slipopt.symmetry import SymmetryReport

    report = SymmetryReport(isometries=("s2",), classification="S1",
                            planes=(1,))
    gait = OptimalGait(W=np.array([0.0, 1.0, 0.0]), s=0.4,
                       V=np.array([0.1, 0.0, 0.0]), power=1.0,
                       consistent=True, classification="helical")
    out = check_prop_symmetry_consequences(report, gait)
    assert out["passed"]  # W off the mirror plane: nothing to enforce
