"""Geometry induced on the base by a section of the fibration.

A section rho with components (p, q) pulls the fibre differentials back to the
base and defines, with the tensor-contraction convention
``(dp (x) d/dx)(v) = dp(v) d/dx``,

    I = -(dp (x) d/dx + dq (x) d/dy),      g = Omega o I,

where Omega = sum dx_i ^ dy_i and dp, dq are read through the section's
Jacobian.  Together with the flat zero connection of the action coordinates
this is the candidate special-symplectic package: the checks below verify
flatness, torsion-freeness, parallel Omega and I, that I squares to minus the
identity, that g is symmetric and Omega is I-invariant, and that the signature
of g (which need not be definite) is constant over the sampled box.

The Jacobian enters twice, deliberately through different routes: the induced
endomorphism uses exact polynomial derivatives, while the graph-restriction
comparison uses the finite-difference frame, so agreement between the two is
an actual cross-check and not an identity of implementation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .calculus import DifferentialForm, EndomorphismField, form_matrix
from .charts import Point, frame_field
from .errors import DegenerateMetricError, NotAlmostComplexError
from .fibration import (
    FibrationModel,
    SectionMap,
    base_symplectic_form,
    build_complex_triple,
)
from .structures import (
    METRIC_ZERO_GUARD,
    TOL_ALGEBRAIC,
    TOL_FD,
    CheckReport,
    FlatConnection,
    check_flatness,
    check_torsion_free,
    covariant_constancy,
    d_nabla_endo,
)

PARALLEL_TOL = 1e-8


def induced_complex_structure(
    section: SectionMap, pt: Point, fd_step: float | None = None
) -> np.ndarray:
    """Matrix of I at a base point: minus the fibre block of the Jacobian.

    Exact polynomial derivatives by default; pass ``fd_step`` to force the
    finite-difference Jacobian instead (useful as a cross-check, but too noisy
    for the tightest algebraic tolerances).
    """
    n2 = 2 * section.model.n
    if fd_step is None:
        jac = section.jacobian(pt)
    else:
        jac = section.jacobian_fd(pt, fd_step)
    return -jac[n2:, :]


def induced_endomorphism(section: SectionMap) -> EndomorphismField:
    return EndomorphismField(
        section.model.base_chart,
        lambda pt: induced_complex_structure(section, pt),
        name=f"I[{section.name}]" if section.name else "I",
    )


@dataclass(frozen=True)
class SpecialKahlerData:
    base_chart: object
    Omega: DifferentialForm
    I: EndomorphismField
    g: Callable[[Point], np.ndarray] = field(repr=False)
    connection: FlatConnection = field(repr=False)
    section_name: str = ""


def build_special_kahler(model: FibrationModel, section: SectionMap) -> SpecialKahlerData:
    Omega = base_symplectic_form(model)
    I = induced_endomorphism(section)

    def metric(pt: Point) -> np.ndarray:
        return form_matrix(Omega, pt) @ I.matrix(pt)

    return SpecialKahlerData(
        base_chart=model.base_chart,
        Omega=Omega,
        I=I,
        g=metric,
        connection=model.connection,
        section_name=section.name,
    )


def kahler_metric(
    Omega: DifferentialForm,
    I: EndomorphismField,
    pt: Point,
    almost_complex_tol: float = PARALLEL_TOL,
) -> tuple[np.ndarray, float]:
    """g = Omega o I at a point, plus the I-invariance residual of Omega.

    Raises if I fails to square to minus the identity: the metric is only
    meaningful for an almost-complex I.
    """
    M_I = I.matrix(pt)
    dim = M_I.shape[0]
    ac_residual = float(np.max(np.abs(M_I @ M_I + np.eye(dim))))
    if ac_residual > almost_complex_tol:
        raise NotAlmostComplexError(
            f"I^2 + Id residual {ac_residual:.3e} exceeds {almost_complex_tol:g}; "
            "refusing to build a metric from a non-almost-complex I"
        )
    M_Omega = form_matrix(Omega, pt)
    g = M_Omega @ M_I
    invariance = float(np.max(np.abs(M_I.T @ M_Omega @ M_I - M_Omega)))
    return g, invariance


def signature(g: np.ndarray, zero_guard: float = METRIC_ZERO_GUARD) -> tuple[int, int]:
    """(positive, negative) eigenvalue counts of a symmetric matrix."""
    eigenvalues = np.linalg.eigvalsh(0.5 * (g + g.T))
    if np.any(np.abs(eigenvalues) < zero_guard):
        worst = float(np.min(np.abs(eigenvalues)))
        raise DegenerateMetricError(
            f"metric eigenvalue {worst:.3e} lies inside the zero guard {zero_guard:g}"
        )
    pos = int(np.sum(eigenvalues > 0))
    return pos, len(eigenvalues) - pos


def special_symplectic_check(
    data: SpecialKahlerData,
    points: Sequence[Point],
    fd_step: float | None = None,
    tol_parallel: float = PARALLEL_TOL,
    tol_algebraic: float = TOL_ALGEBRAIC,
    tol_fd: float = TOL_FD,
) -> list[CheckReport]:
    """Reports for: flat, torsion-free, Omega parallel, I parallel, I^2 = -Id."""
    conn = data.connection
    chart = conn.chart
    reports = [
        check_flatness(
            conn, points, fd_step, tol_fd, identity_name="special_kahler.connection_flat"
        ),
        check_torsion_free(
            conn, points, tol_algebraic, identity_name="special_kahler.connection_torsion_free"
        ),
    ]

    worst = max(
        float(np.max(np.abs(covariant_constancy(conn, data.Omega, pt, fd_step))))
        for pt in points
    )
    reports.append(
        CheckReport.from_residual(
            "special_kahler.base_form_parallel",
            len(points),
            worst,
            tol_parallel,
            statement="the base symplectic form is parallel for the flat connection",
        )
    )

    frames = [frame_field(chart, a) for a in range(chart.dim)]
    worst = 0.0
    for pt in points:
        for a in range(chart.dim):
            for b in range(a + 1, chart.dim):
                value = d_nabla_endo(conn, data.I, frames[a], frames[b], pt, fd_step)
                worst = max(worst, float(np.max(np.abs(value))))
    reports.append(
        CheckReport.from_residual(
            "special_kahler.complex_structure_parallel",
            len(points),
            worst,
            tol_parallel,
            statement="the exterior covariant derivative of I vanishes on the coordinate frame",
        )
    )

    eye = np.eye(chart.dim)
    worst = max(
        float(np.max(np.abs(data.I.matrix(pt) @ data.I.matrix(pt) + eye))) for pt in points
    )
    reports.append(
        CheckReport.from_residual(
            "special_kahler.squares_to_minus_identity",
            len(points),
            worst,
            tol_algebraic,
            statement="the induced endomorphism squares to minus the identity",
        )
    )
    return reports


def kahler_reports(
    data: SpecialKahlerData,
    points: Sequence[Point],
    tol_algebraic: float = TOL_ALGEBRAIC,
) -> list[CheckReport]:
    """Metric-level reports: symmetry (exact), invariance, constant signature."""
    reports: list[CheckReport] = []

    sym_worst = max(float(np.max(np.abs(data.g(pt) - data.g(pt).T))) for pt in points)
    reports.append(
        CheckReport.from_residual(
            "special_kahler.metric_symmetric",
            len(points),
            sym_worst,
            0.0,
            statement="g agrees with its transpose exactly at every sampled point",
        )
    )

    inv_worst = 0.0
    for pt in points:
        M_I = data.I.matrix(pt)
        M_Omega = form_matrix(data.Omega, pt)
        inv_worst = max(
            inv_worst, float(np.max(np.abs(M_I.T @ M_Omega @ M_I - M_Omega)))
        )
    reports.append(
        CheckReport.from_residual(
            "special_kahler.base_form_invariant",
            len(points),
            inv_worst,
            tol_algebraic,
            statement="Omega(I., I.) agrees with Omega",
        )
    )

    try:
        signatures = {signature(data.g(pt)) for pt in points}
    except DegenerateMetricError as exc:
        reports.append(
            CheckReport.from_residual(
                "special_kahler.signature_constant",
                len(points),
                float("inf"),
                0.0,
                statement=f"signature undefined: {exc}",
            )
        )
    else:
        constant = len(signatures) == 1
        sig_text = ", ".join(f"(+{p}, -{m})" for p, m in sorted(signatures))
        reports.append(
            CheckReport.from_residual(
                "special_kahler.signature_constant",
                len(points),
                0.0 if constant else 1.0,
                0.0,
                statement=f"eigenvalue signature over the sample: {sig_text}",
            )
        )
    return reports


def induced_vs_restriction(
    model: FibrationModel,
    section: SectionMap,
    points: Sequence[Point],
    fd_step: float | None = None,
    tolerance: float = TOL_FD,
) -> CheckReport:
    """Cross-check: I from the section formula against the first complex
    structure restricted to the graph and pushed to the base.

    The projection kills the fibre components, so the pushed restriction is
    the base block of J applied to the FD graph frame.  Meaningful when the
    graph is invariant (the invariance defect is folded into the residual).
    """
    J = build_complex_triple(model).J_omega
    n2 = 2 * model.n
    worst = 0.0
    for pt in points:
        frame = section.jacobian_fd(pt, fd_step)
        moved = J.matrix(section.evaluate(pt)) @ frame
        restriction = moved[:n2, :]
        # invariance defect: the moved frame should be graph-tangent again
        rebuilt = frame @ restriction
        defect = float(np.max(np.abs(rebuilt - moved)))
        agree = float(np.max(np.abs(restriction - induced_complex_structure(section, pt))))
        worst = max(worst, max(defect, agree))
    return CheckReport.from_residual(
        "special_kahler.matches_graph_restriction",
        len(points),
        worst,
        tolerance,
        statement=(
            "the section-induced endomorphism agrees with the graph restriction of "
            "the first complex structure pushed through the projection"
        ),
    )
