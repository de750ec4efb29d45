import numpy as np
import pytest

from hypersymplectic.calculus import DifferentialForm, EndomorphismField
from hypersymplectic.charts import Chart, VectorField, frame_field
from hypersymplectic.structures import (
    CheckReport,
    FlatConnection,
    check_almost_complex,
    check_closedness,
    check_nondegeneracy,
    check_symplectic,
    covariant_constancy,
    covariant_derivative,
    nijenhuis,
)

PLANE = Chart("plane", ("u", "v"), (-1.0, -1.0), (1.0, 1.0))
SPACE = Chart("space", ("x1", "x2", "x3", "x4"), (-1.0,) * 4, (1.0,) * 4)


def test_report_pass_boundary():
    assert CheckReport.from_residual("id", 1, 1e-9, 1e-9).passed
    assert not CheckReport.from_residual("id", 1, 1.0000001e-9, 1e-9).passed
    as_dict = CheckReport.from_residual("id", 3, 0.0, 1e-6, statement="s").as_dict()
    assert as_dict == {
        "identity": "id",
        "n_points": 3,
        "max_residual": 0.0,
        "tolerance": 1e-6,
        "passed": True,
        "statement": "s",
    }


def test_zero_connection_is_flat_and_torsion_free():
    conn = FlatConnection.zero(PLANE)
    pt = PLANE.point([0.2, 0.3])
    assert conn.curvature_residual(pt) == 0.0
    assert conn.torsion_residual(pt) == 0.0


def test_curvature_detects_a_non_flat_connection():
    def christoffel(pt):
        G = np.zeros((2, 2, 2))
        G[0, 1, 1] = pt.coords[0]  # Gamma^u_vv = u
        return G

    conn = FlatConnection(PLANE, christoffel)
    assert conn.curvature_residual(PLANE.point([0.5, 0.1])) > 0.5
    assert conn.torsion_residual(PLANE.point([0.5, 0.1])) == 0.0


def test_torsion_detects_asymmetric_coefficients():
    G = np.zeros((2, 2, 2))
    G[0, 0, 1] = 1.0
    conn = FlatConnection(PLANE, lambda pt: G)
    assert conn.torsion_residual(PLANE.point([0.0, 0.0])) == 1.0


def test_christoffel_shape_validated():
    conn = FlatConnection(PLANE, lambda pt: np.zeros((2, 2)))
    with pytest.raises(ValueError):
        conn.gamma(PLANE.point([0.0, 0.0]))


def test_covariant_derivative_reduces_to_directional_derivative():
    conn = FlatConnection.zero(PLANE)
    V = VectorField(PLANE, lambda pt: np.array([pt.coords[0] ** 2, pt.coords[1]]))
    X = frame_field(PLANE, 0)
    pt = PLANE.point([0.3, -0.2])
    value = covariant_derivative(conn, X, V, pt, 1e-5)
    assert np.allclose(value, [0.6, 0.0], atol=1e-9)


def test_covariant_constancy_flags_varying_forms():
    conn = FlatConnection.zero(PLANE)
    pt = PLANE.point([0.1, 0.4])
    constant = DifferentialForm.constant(PLANE, 2, {(0, 1): 2.5})
    assert np.max(np.abs(covariant_constancy(conn, constant, pt))) == 0.0
    varying = DifferentialForm(PLANE, 2, {(0, 1): lambda p: 1.0 + p.coords[0]})
    assert np.max(np.abs(covariant_constancy(conn, varying, pt))) > 0.5


def test_nijenhuis_vanishes_for_constant_structures():
    J = EndomorphismField.constant(PLANE, [[0.0, -1.0], [1.0, 0.0]])
    rng = np.random.default_rng(2)
    pt = PLANE.point([0.2, -0.6])
    for _ in range(5):
        X = VectorField.constant(PLANE, rng.uniform(-1, 1, 2))
        Y = VectorField.constant(PLANE, rng.uniform(-1, 1, 2))
        assert np.max(np.abs(nijenhuis(J, X, Y, pt))) == 0.0


def test_nijenhuis_detects_non_integrable_structure():
    """J maps e1 -> e2, e2 -> -e1, e3 -> x2 e1 + e4, e4 -> -x2 e2 - e3.

    This squares to minus the identity everywhere, yet N_J(e3, e4) = x2 e1,
    so integrability genuinely fails away from {x2 = 0}.
    """

    def matrix(pt):
        x2 = pt.coords[1]
        return np.array(
            [
                [0.0, -1.0, x2, 0.0],
                [1.0, 0.0, 0.0, -x2],
                [0.0, 0.0, 0.0, -1.0],
                [0.0, 0.0, 1.0, 0.0],
            ]
        )

    J = EndomorphismField(SPACE, matrix)
    pt = SPACE.point([0.1, 0.7, -0.2, 0.3])
    assert np.allclose(J.matrix(pt) @ J.matrix(pt), -np.eye(4), atol=1e-14)
    X = frame_field(SPACE, 2)
    Y = frame_field(SPACE, 3)
    N = nijenhuis(J, X, Y, pt)
    assert np.allclose(N, [0.7, 0.0, 0.0, 0.0], atol=1e-8)
    report = check_almost_complex(J, SPACE.sample(20, 3))
    assert report.passed  # almost complex everywhere, just not integrable


def test_closedness_check_pass_and_fail():
    pts = PLANE.sample(10, 4)
    closed = DifferentialForm.constant(PLANE, 2, {(0, 1): 1.0}, name="vol")
    assert check_closedness(closed, pts).passed
    alpha = DifferentialForm(PLANE, 1, {(1,): lambda p: p.coords[0]}, name="u dv")
    report = check_closedness(alpha, pts)
    assert not report.passed
    assert report.max_residual == pytest.approx(1.0, abs=1e-8)


def test_nondegeneracy_check_slack_sign():
    pts = SPACE.sample(10, 5)
    good = DifferentialForm.constant(SPACE, 2, {(0, 1): 1.0, (2, 3): 1.0})
    report = check_nondegeneracy(good, pts)
    assert report.passed and report.max_residual <= 0.0
    bad = DifferentialForm.constant(SPACE, 2, {(0, 1): 1.0})
    assert not check_nondegeneracy(bad, pts).passed


def test_symplectic_check_combines_both_conditions():
    pts = SPACE.sample(10, 6)
    good = DifferentialForm.constant(SPACE, 2, {(0, 1): 1.0, (2, 3): 1.0}, name="w")
    assert check_symplectic(good, pts).passed
    degenerate = DifferentialForm.constant(SPACE, 2, {(0, 1): 1.0}, name="b")
    assert not check_symplectic(degenerate, pts).passed


def test_almost_complex_check_fails_for_involutions():
    refl = EndomorphismField.constant(PLANE, np.eye(2), name="refl")
    report = check_almost_complex(refl, PLANE.sample(5, 7))
    assert not report.passed
    assert report.max_residual == pytest.approx(2.0)
