import numpy as np
import pytest

from hypersymplectic.calculus import form_matrix
from hypersymplectic.errors import DegenerateFormError, GeometryError
from hypersymplectic.fibration import (
    SectionMap,
    build_complex_triple,
    build_structure_triple,
    complex_submanifold_check,
    cycle_normalization_matrix,
    expected_composite_matrix,
    gradient_section,
    holomorphic_frame_check,
    make_model,
    recursion_operator,
    section_pullback,
    span_invariance_residual,
    standard_frame_pairs,
    standard_sigma_section,
    verify_hypersymplectic,
    verify_lagrangian_fibres,
    zero_section,
)
from hypersymplectic.polynomials import Polynomial

MODEL = make_model(1)
TRIPLE = build_structure_triple(MODEL)
COMPLEXES = build_complex_triple(MODEL)

# Hand-checked constant matrices at n = 1, coordinate order (x, y, p, q).
M_OMEGA = np.array(
    [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=float
)
M_CHI = np.array(
    [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float
)
M_SIGMA = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=float
)
RECURSION = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=float
)


def total_point(coords):
    return MODEL.total_chart.point(coords)


def base_point(coords):
    return MODEL.base_chart.point(coords)


def test_model_layout():
    assert MODEL.total_chart.coords == ("x", "y", "p", "q")
    assert MODEL.base_chart.coords == ("x", "y")
    assert MODEL.vertical_axes() == [2, 3]
    assert MODEL.total_chart.lower[2:] == (0.0, 0.0)
    assert MODEL.total_chart.upper[2] == pytest.approx(2 * np.pi)
    model3 = make_model(3)
    assert model3.total_chart.coords[:3] == ("x1", "x2", "x3")
    assert model3.ix(1) == 1 and model3.iy(1) == 4
    assert model3.ip(1) == 7 and model3.iq(1) == 10


def test_model_validation():
    with pytest.raises(ValueError):
        make_model(0)
    with pytest.raises(ValueError):
        make_model(2, action_bounds=[(-1.0, 1.0)])


def test_form_matrices_match_the_pinned_tables():
    pt = total_point([0.3, -0.2, 1.0, 2.0])
    assert np.array_equal(form_matrix(TRIPLE.omega, pt), M_OMEGA)
    assert np.array_equal(form_matrix(TRIPLE.chi, pt), M_CHI)
    assert np.array_equal(form_matrix(TRIPLE.sigma, pt), M_SIGMA)
    for M in (M_OMEGA, M_CHI, M_SIGMA):
        assert np.linalg.det(M) == pytest.approx(1.0)


def test_complex_structure_tables():
    pt = total_point([0.0, 0.0, 1.0, 1.0])
    J_omega = COMPLEXES.J_omega.matrix(pt)
    # vector action: x -> p, y -> q, p -> -x, q -> -y
    assert np.array_equal(J_omega @ np.eye(4)[0], [0, 0, 1, 0])
    assert np.array_equal(J_omega @ np.eye(4)[2], [-1, 0, 0, 0])
    J_chi = COMPLEXES.J_chi.matrix(pt)
    assert np.array_equal(J_chi @ np.eye(4)[0], [0, 1, 0, 0])
    assert np.array_equal(J_chi @ np.eye(4)[2], [0, 0, 0, -1])
    assert np.array_equal(COMPLEXES.J_sigma.matrix(pt), expected_composite_matrix(MODEL))


def test_composite_covector_table():
    pt = total_point([0.1, 0.2, 0.3, 0.4])
    K = COMPLEXES.J_sigma
    dx, dy, dp, dq = np.eye(4)
    assert np.array_equal(K.apply_covector(pt, dx), dq)
    assert np.array_equal(K.apply_covector(pt, dy), -dp)
    assert np.array_equal(K.apply_covector(pt, dq), -dx)
    assert np.array_equal(K.apply_covector(pt, dp), dy)


def test_recursion_operator_fixture():
    pt = total_point([0.5, 0.5, 3.0, 3.0])
    A = recursion_operator(TRIPLE.omega, TRIPLE.chi, pt)
    assert np.allclose(A, RECURSION, atol=1e-14)
    assert np.allclose(A @ A, -np.eye(4), atol=1e-14)


def test_recursion_operator_rejects_degenerate_input():
    from hypersymplectic.calculus import DifferentialForm

    degenerate = DifferentialForm.constant(MODEL.total_chart, 2, {(0, 1): 1.0})
    with pytest.raises(DegenerateFormError):
        recursion_operator(degenerate, TRIPLE.chi, total_point([0, 0, 1, 1]))


def test_fibres_are_lagrangian_for_omega_and_sigma_but_not_chi():
    pts = MODEL.total_chart.sample(20, 42)
    assert verify_lagrangian_fibres(MODEL, TRIPLE.omega, pts).passed
    assert verify_lagrangian_fibres(MODEL, TRIPLE.sigma, pts).passed
    chi_report = verify_lagrangian_fibres(MODEL, TRIPLE.chi, pts)
    assert not chi_report.passed  # chi pairs the two fibre directions
    assert chi_report.max_residual == pytest.approx(1.0)


def test_holomorphic_frames():
    pairs = standard_frame_pairs(MODEL)
    pt = total_point([0.2, 0.4, 1.0, 2.0])
    for key, J in (("J_omega", COMPLEXES.J_omega), ("J_chi", COMPLEXES.J_chi),
                   ("J_sigma", COMPLEXES.J_sigma)):
        result = holomorphic_frame_check(J, pairs[key], pt)
        assert result.max_residual == 0.0
    # a mismatched pair is caught
    bad = holomorphic_frame_check(COMPLEXES.J_omega, pairs["J_chi"], pt)
    assert bad.max_residual > 1.0


def test_full_battery_passes_at_rank_two():
    reports = verify_hypersymplectic(make_model(2), n_points=25, seed=9)
    failed = [r.identity_name for r in reports if not r.passed]
    assert failed == []


# ---------------------------------------------------------------------------
# Sections


def make_section(p_terms, q_terms, name):
    p = Polynomial.from_terms(2, p_terms)
    q = Polynomial.from_terms(2, q_terms)
    return SectionMap(MODEL, (p,), (q,), name=name)


def pullback_residual(section, form, points):
    worst = 0.0
    for pt in points:
        table = section_pullback(MODEL, section, form, pt)
        worst = max(worst, max(abs(v) for v in table.values()))
    return worst


def test_section_validation():
    with pytest.raises(ValueError):
        SectionMap(MODEL, (), (Polynomial.zero(2),), name="short")
    with pytest.raises(ValueError):
        make_section([((9, 0), 1.0)], [], "too-steep")
    wrong_arity = Polynomial.zero(3)
    with pytest.raises(ValueError):
        SectionMap(MODEL, (wrong_arity,), (wrong_arity,), name="bad")


def test_section_evaluation_and_chart_guard():
    rot = standard_sigma_section(MODEL)
    pt = base_point([0.3, -0.5])
    total = rot.evaluate(pt)
    assert np.allclose(total.coords, [0.3, -0.5, -0.5, -0.3])
    with pytest.raises(GeometryError):
        rot.evaluate(total_point([0, 0, 0, 0]))


def test_exact_and_fd_jacobians_agree():
    curved = make_section([((2, 0), 1.0), ((0, 1), 1.0)], [((1, 1), -2.0)], "curved")
    pt = base_point([0.4, -0.3])
    exact = curved.jacobian(pt)
    assert np.allclose(exact, curved.jacobian_fd(pt), atol=1e-9)
    assert np.array_equal(exact[:2], np.eye(2))
    assert np.allclose(exact[2], [0.8, 1.0])  # d(x^2 + y)
    assert np.allclose(exact[3], [0.6, -0.8])  # d(-2xy)


def test_zero_section_is_omega_lagrangian_and_chi_invariant():
    pts = MODEL.base_chart.sample(30, 42)
    zero = zero_section(MODEL)
    assert pullback_residual(zero, TRIPLE.omega, pts) <= 1e-10
    worst = max(
        complex_submanifold_check(MODEL, zero, COMPLEXES.J_chi, pt) for pt in pts
    )
    assert worst <= 1e-6


def test_rotation_section_pullback_table():
    pts = MODEL.base_chart.sample(30, 42)
    rot = standard_sigma_section(MODEL)
    assert pullback_residual(rot, TRIPLE.sigma, pts) <= 1e-10
    assert pullback_residual(rot, TRIPLE.chi, pts) <= 1e-10
    # and it is NOT omega-Lagrangian: s*omega = (q_x - p_y) dx^dy = -2 dx^dy
    res = section_pullback(MODEL, rot, TRIPLE.omega, pts[0])
    assert res[(0, 1)] == pytest.approx(-2.0, abs=1e-9)


def test_rotation_graph_is_preserved_by_the_first_structure():
    pts = MODEL.base_chart.sample(30, 42)
    rot = standard_sigma_section(MODEL)
    worst = max(
        complex_submanifold_check(MODEL, rot, COMPLEXES.J_omega, pt) for pt in pts
    )
    assert worst <= 1e-6
    # ... but not by J_chi
    bad = complex_submanifold_check(MODEL, rot, COMPLEXES.J_chi, pts[0])
    assert bad > 1e-2


def test_tilt_section_sigma_pullback_coefficient():
    # p = x, q = 0 pulls sigma back to -(q_y + p_x) dx^dy = -dx^dy
    tilt = make_section([((1, 0), 1.0)], [], "tilt")
    table = section_pullback(MODEL, tilt, TRIPLE.sigma, base_point([0.2, 0.7]))
    assert table[(0, 1)] == pytest.approx(-1.0, abs=1e-9)


def test_lagrangian_alone_does_not_force_invariance():
    """The graph of p = 2x, q = 0 kills omega (it is a gradient graph) yet is
    moved off itself by J_chi; invariance needs the other two pullbacks to
    vanish as well, which fails here because the potential x^2 is not
    harmonic."""
    section = gradient_section(MODEL, Polynomial.from_terms(2, [((2, 0), 1.0)]))
    pts = MODEL.base_chart.sample(20, 42)
    assert pullback_residual(section, TRIPLE.omega, pts) <= 1e-10
    worst = max(
        complex_submanifold_check(MODEL, section, COMPLEXES.J_chi, pt) for pt in pts
    )
    assert worst > 1e-2


def test_harmonic_gradient_graphs_are_chi_invariant():
    pts = MODEL.base_chart.sample(20, 42)
    for terms in ([((1, 1), 1.0)], [((2, 0), 0.5), ((0, 2), -0.5)]):
        section = gradient_section(MODEL, Polynomial.from_terms(2, terms))
        assert pullback_residual(section, TRIPLE.omega, pts) <= 1e-10
        worst = max(
            complex_submanifold_check(MODEL, section, COMPLEXES.J_chi, pt)
            for pt in pts
        )
        assert worst <= 1e-6


def test_gradient_section_arity_guard():
    with pytest.raises(ValueError):
        gradient_section(MODEL, Polynomial.coordinate(3, 0))


def test_span_invariance_rejects_rank_deficient_frames():
    frame = np.zeros((4, 2))
    with pytest.raises(GeometryError):
        span_invariance_residual(frame, np.eye(4)[:, :2])


def test_cycle_normalization_is_the_identity():
    matrix = cycle_normalization_matrix(MODEL)
    assert np.allclose(matrix, np.eye(2), atol=1e-8)
    matrix3 = cycle_normalization_matrix(make_model(3))
    assert np.allclose(matrix3, np.eye(6), atol=1e-8)
