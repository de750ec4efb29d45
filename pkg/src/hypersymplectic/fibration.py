"""The model fibration, its three symplectic and three complex structures.

The total chart of a rank-n model carries coordinates

    (x_1..x_n, y_1..y_n, p_1..p_n, q_1..q_n)

where (x, y) are action (base) coordinates and (p, q) are angle coordinates
with period 2*pi.  On this chart the package builds the block-constant triple

    omega = dp ^ dx + dq ^ dy
    chi   = -dp ^ dq + dx ^ dy
    sigma = dq ^ dx + dy ^ dp

and the complex-structure triple J_omega, J_chi, J_sigma, where J_sigma is
*derived* by composing the first two in the covector action rather than being
hand-coded; the printed constant table for the composite is kept separately as
an independent fixture so the composition identity is an actual check.

Sections of the fibration are polynomial maps (x, y) -> (p, q); their graphs
are probed for Lagrangian behaviour (pullback of a chosen 2-form vanishes) and
for invariance under a chosen complex structure (complex-submanifold check).
A graph turns out to be invariant under one J exactly when it is Lagrangian
for the other two symplectic forms; the test suite pins both directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .calculus import (
    DifferentialForm,
    EndomorphismField,
    compose_covector,
    coordinate_differential,
    form_matrix,
)
from .charts import Chart, Point, VectorField
from .errors import DegenerateFormError, GeometryError
from .polynomials import Polynomial
from .structures import (
    DEFAULT_POINTS,
    DEFAULT_SEED,
    NONDEG_FLOOR,
    TOL_ALGEBRAIC,
    TOL_FD,
    CheckReport,
    FlatConnection,
    check_almost_complex,
    check_closedness,
    check_nondegeneracy,
    nijenhuis,
)

ANGLE_PERIOD = 2.0 * math.pi
MAX_SECTION_DEGREE = 8


@dataclass(frozen=True)
class AngleCycle:
    """One lattice generator: the coordinate circle of a single angle axis."""

    axis: int
    period: float = ANGLE_PERIOD


@dataclass(frozen=True)
class FibrationModel:
    n: int
    base_chart: Chart
    total_chart: Chart
    connection: FlatConnection
    lattice_basis: tuple[AngleCycle, ...]

    # Block index helpers (0-based block slot i in 0..n-1).
    def ix(self, i: int) -> int:
        return i

    def iy(self, i: int) -> int:
        return self.n + i

    def ip(self, i: int) -> int:
        return 2 * self.n + i

    def iq(self, i: int) -> int:
        return 3 * self.n + i

    def vertical_axes(self) -> list[int]:
        return list(range(2 * self.n, 4 * self.n))


def _names(prefix: str, n: int) -> tuple[str, ...]:
    if n == 1:
        return (prefix,)
    return tuple(f"{prefix}{i + 1}" for i in range(n))


def make_model(
    n: int,
    action_bounds: Sequence[tuple[float, float]] | None = None,
    angle_period: float = ANGLE_PERIOD,
    name: str = "model",
) -> FibrationModel:
    """Build the rank-n model on a box chart.

    ``action_bounds`` gives one (lower, upper) pair per action coordinate in
    the order (x_1..x_n, y_1..y_n); the default box is [-1, 1] per axis.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if action_bounds is None:
        action_bounds = [(-1.0, 1.0)] * (2 * n)
    if len(action_bounds) != 2 * n:
        raise ValueError(f"need {2 * n} action bounds, got {len(action_bounds)}")
    base_coords = _names("x", n) + _names("y", n)
    base_lower = tuple(lo for lo, _ in action_bounds)
    base_upper = tuple(hi for _, hi in action_bounds)
    base = Chart(f"{name}-base", base_coords, base_lower, base_upper)
    total_coords = base_coords + _names("p", n) + _names("q", n)
    total = Chart(
        f"{name}-total",
        total_coords,
        base_lower + (0.0,) * (2 * n),
        base_upper + (angle_period,) * (2 * n),
    )
    cycles = tuple(AngleCycle(axis, angle_period) for axis in range(2 * n, 4 * n))
    return FibrationModel(
        n=n,
        base_chart=base,
        total_chart=total,
        connection=FlatConnection.zero(base),
        lattice_basis=cycles,
    )


@dataclass(frozen=True)
class HyperSymplecticTriple:
    omega: DifferentialForm
    chi: DifferentialForm
    sigma: DifferentialForm

    def forms(self) -> tuple[DifferentialForm, DifferentialForm, DifferentialForm]:
        return (self.omega, self.chi, self.sigma)


@dataclass(frozen=True)
class HyperComplexTriple:
    J_omega: EndomorphismField
    J_chi: EndomorphismField
    J_sigma: EndomorphismField

    def endos(self) -> tuple[EndomorphismField, ...]:
        return (self.J_omega, self.J_chi, self.J_sigma)


def build_structure_triple(model: FibrationModel) -> HyperSymplecticTriple:
    """The three block-constant 2-forms on the total chart."""
    chart = model.total_chart
    omega: dict = {}
    chi: dict = {}
    sigma: dict = {}
    for i in range(model.n):
        ix, iy, ip, iq = model.ix(i), model.iy(i), model.ip(i), model.iq(i)
        omega[(ix, ip)] = -1.0  # dp ^ dx
        omega[(iy, iq)] = -1.0  # dq ^ dy
        chi[(ip, iq)] = -1.0  # -dp ^ dq
        chi[(ix, iy)] = 1.0  # dx ^ dy
        sigma[(ix, iq)] = -1.0  # dq ^ dx
        sigma[(iy, ip)] = 1.0  # dy ^ dp
    return HyperSymplecticTriple(
        omega=DifferentialForm.constant(chart, 2, omega, name="omega"),
        chi=DifferentialForm.constant(chart, 2, chi, name="chi"),
        sigma=DifferentialForm.constant(chart, 2, sigma, name="sigma"),
    )


def base_symplectic_form(model: FibrationModel) -> DifferentialForm:
    """Omega = sum_i dx_i ^ dy_i on the base chart."""
    table = {(i, model.n + i): 1.0 for i in range(model.n)}
    return DifferentialForm.constant(model.base_chart, 2, table, name="Omega")


def _omega_matrix(model: FibrationModel) -> np.ndarray:
    dim = 4 * model.n
    M = np.zeros((dim, dim))
    for i in range(model.n):
        M[model.ip(i), model.ix(i)] = 1.0
        M[model.ix(i), model.ip(i)] = -1.0
        M[model.iq(i), model.iy(i)] = 1.0
        M[model.iy(i), model.iq(i)] = -1.0
    return M


def _chi_matrix(model: FibrationModel) -> np.ndarray:
    dim = 4 * model.n
    M = np.zeros((dim, dim))
    for i in range(model.n):
        M[model.iy(i), model.ix(i)] = 1.0
        M[model.ix(i), model.iy(i)] = -1.0
        M[model.iq(i), model.ip(i)] = -1.0
        M[model.ip(i), model.iq(i)] = 1.0
    return M


def build_complex_triple(model: FibrationModel) -> HyperComplexTriple:
    """J_omega and J_chi from their constant tables; J_sigma by composition.

    The composition is taken in the covector action (apply J_chi to a
    covector first, then J_omega), which is the reading under which the
    composite reproduces the pinned covector table; the tangent-action
    composite differs by an overall sign.
    """
    chart = model.total_chart
    J_omega = EndomorphismField.constant(chart, _omega_matrix(model), name="J_omega")
    J_chi = EndomorphismField.constant(chart, _chi_matrix(model), name="J_chi")
    J_sigma_raw = compose_covector(J_omega, J_chi)
    frozen = J_sigma_raw.matrix(chart.point(np.zeros(chart.dim)))
    J_sigma = EndomorphismField.constant(chart, frozen, name="J_sigma")
    return HyperComplexTriple(J_omega=J_omega, J_chi=J_chi, J_sigma=J_sigma)


def expected_composite_matrix(model: FibrationModel) -> np.ndarray:
    """Independent constant fixture for the composite structure:

    per block  x -> -q,  y -> p,  p -> -y,  q -> x  (vector action),
    equivalently the covector table dx -> dq, dy -> -dp, dq -> -dx, dp -> dy.
    """
    dim = 4 * model.n
    M = np.zeros((dim, dim))
    for i in range(model.n):
        M[model.iq(i), model.ix(i)] = -1.0
        M[model.ip(i), model.iy(i)] = 1.0
        M[model.iy(i), model.ip(i)] = -1.0
        M[model.ix(i), model.iq(i)] = 1.0
    return M


def recursion_operator(
    omega: DifferentialForm, chi: DifferentialForm, pt: Point
) -> np.ndarray:
    """The endomorphism A with chi(X, Y) = omega(A X, Y) for all X, Y.

    In matrices A = M_omega^{-1} M_chi; omega must be nondegenerate at pt.
    """
    M_omega = form_matrix(omega, pt)
    M_chi = form_matrix(chi, pt)
    det = float(np.linalg.det(M_omega))
    if abs(det) < 1e-12:
        raise DegenerateFormError(
            f"recursion operator needs a nondegenerate base form; |det| = {abs(det):.3e}"
        )
    return np.linalg.solve(M_omega, M_chi)


@dataclass(frozen=True)
class FrameCheckResult:
    max_residual: float
    signs: tuple[int, ...]


def holomorphic_frame_check(
    J: EndomorphismField,
    pairs: Sequence[tuple[DifferentialForm, DifferentialForm]],
    pt: Point,
) -> FrameCheckResult:
    """Check that each (a, b) pair spans a J-eigen coframe, a + ib.

    For each pair the residual is min over s in {+1, -1} of
    ``|J a - s (-b)| + |J b - s a|`` in the covector action; s = +1 matches
    J a = -b (the pair represents a holomorphic differential), s = -1 the
    conjugate orientation.  Returns the worst residual and the sign that
    matched per pair.
    """
    worst = 0.0
    signs: list[int] = []
    for a, b in pairs:
        a_c = a.components(pt)
        b_c = b.components(pt)
        Ja = J.apply_covector(pt, a_c)
        Jb = J.apply_covector(pt, b_c)
        best_sign, best = 1, None
        for s in (1, -1):
            res = float(np.linalg.norm(Ja - s * (-b_c)) + np.linalg.norm(Jb - s * a_c))
            if best is None or res < best:
                best, best_sign = res, s
        worst = max(worst, best)
        signs.append(best_sign)
    return FrameCheckResult(max_residual=worst, signs=tuple(signs))


def standard_frame_pairs(
    model: FibrationModel,
) -> dict[str, list[tuple[DifferentialForm, DifferentialForm]]]:
    """The coordinate coframe pairs each complex structure should preserve."""
    chart = model.total_chart
    d = lambda axis: coordinate_differential(chart, axis)
    pairs: dict[str, list] = {"J_omega": [], "J_chi": [], "J_sigma": []}
    for i in range(model.n):
        ix, iy, ip, iq = model.ix(i), model.iy(i), model.ip(i), model.iq(i)
        pairs["J_omega"] += [(d(ix), d(ip)), (d(iy), d(iq))]
        pairs["J_chi"] += [(d(iq), d(ip)), (d(ix), d(iy))]
        pairs["J_sigma"] += [(d(ix), d(iq)), (d(ip), d(iy))]
    return pairs


def verify_lagrangian_fibres(
    model: FibrationModel,
    form: DifferentialForm,
    points: Sequence[Point],
    tolerance: float = TOL_ALGEBRAIC,
) -> CheckReport:
    """Max |form(e_a, e_b)| over vertical (fibre) coordinate pairs."""
    vert = model.vertical_axes()
    worst = 0.0
    for pt in points:
        M = form_matrix(form, pt)
        worst = max(worst, float(np.max(np.abs(M[np.ix_(vert, vert)]))))
    return CheckReport.from_residual(
        f"lagrangian_fibres({form.name})",
        len(points),
        worst,
        tolerance,
        statement=f"fibre directions are isotropic for {form.name}",
    )


def verify_hypersymplectic(
    model: FibrationModel,
    n_points: int = DEFAULT_POINTS,
    seed: int = DEFAULT_SEED,
    fd_step: float | None = None,
    tol_algebraic: float = TOL_ALGEBRAIC,
    tol_fd: float = TOL_FD,
    nondeg_floor: float = NONDEG_FLOOR,
) -> list[CheckReport]:
    """The full identity battery for the triple structure, sorted by name."""
    points = model.total_chart.sample(n_points, seed)
    triple = build_structure_triple(model)
    complexes = build_complex_triple(model)
    dim = model.total_chart.dim
    eye = np.eye(dim)
    reports: list[CheckReport] = []

    for f in triple.forms():
        reports.append(
            check_closedness(
                f, points, fd_step, tol_fd, identity_name=f"hypersymplectic.closed.{f.name}"
            )
        )
        reports.append(
            check_nondegeneracy(
                f,
                points,
                nondeg_floor,
                identity_name=f"hypersymplectic.nondegenerate.{f.name}",
            )
        )

    for J in complexes.endos():
        reports.append(
            check_almost_complex(
                J,
                points,
                tol_algebraic,
                identity_name=f"hypersymplectic.squares_to_minus_identity.{J.name}",
            )
        )

    named_forms = {"omega": triple.omega, "chi": triple.chi, "sigma": triple.sigma}
    for a, b in (("omega", "chi"), ("omega", "sigma"), ("chi", "sigma")):
        worst = 0.0
        for pt in points:
            A = recursion_operator(named_forms[a], named_forms[b], pt)
            worst = max(worst, float(np.max(np.abs(A @ A + eye))))
        reports.append(
            CheckReport.from_residual(
                f"hypersymplectic.recursion_squares.{a}_{b}",
                len(points),
                worst,
                tol_algebraic,
                statement=f"the recursion operator of ({a}, {b}) squares to minus the identity",
            )
        )

    endo_list = complexes.endos()
    for idx_a in range(3):
        for idx_b in range(idx_a + 1, 3):
            Ja, Jb = endo_list[idx_a], endo_list[idx_b]
            worst = 0.0
            for pt in points:
                Ca = Ja.covector_matrix(pt)
                Cb = Jb.covector_matrix(pt)
                worst = max(worst, float(np.max(np.abs(Ca @ Cb + Cb @ Ca))))
            reports.append(
                CheckReport.from_residual(
                    f"hypersymplectic.anticommute.{Ja.name}_{Jb.name}",
                    len(points),
                    worst,
                    tol_algebraic,
                    statement=f"{Ja.name} and {Jb.name} anticommute in the covector action",
                )
            )

    rng = np.random.default_rng(seed + 1)
    field_pairs = rng.uniform(-1.0, 1.0, size=(len(points), 2, dim))
    for J in endo_list:
        worst = 0.0
        for pt, (vx, vy) in zip(points, field_pairs):
            X = VectorField.constant(model.total_chart, vx)
            Y = VectorField.constant(model.total_chart, vy)
            worst = max(worst, float(np.max(np.abs(nijenhuis(J, X, Y, pt, fd_step)))))
        reports.append(
            CheckReport.from_residual(
                f"hypersymplectic.nijenhuis.{J.name}",
                len(points),
                worst,
                tol_fd,
                statement=f"Nijenhuis tensor of {J.name} vanishes on sampled field pairs",
            )
        )

    expected = expected_composite_matrix(model)
    worst = max(
        float(np.max(np.abs(complexes.J_sigma.matrix(pt) - expected))) for pt in points
    )
    reports.append(
        CheckReport.from_residual(
            "hypersymplectic.composition.sigma_from_omega_chi",
            len(points),
            worst,
            tol_algebraic,
            statement=(
                "composing the first two complex structures in the covector action "
                "reproduces the pinned constant table of the third"
            ),
        )
    )

    return sorted(reports, key=lambda r: r.identity_name)


# ---------------------------------------------------------------------------
# Sections


@dataclass(frozen=True)
class SectionMap:
    """A polynomial section (x, y) -> (x, y, p(x, y), q(x, y))."""

    model: FibrationModel
    p: tuple[Polynomial, ...]
    q: tuple[Polynomial, ...]
    name: str = ""
    _jac_polys: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self) -> None:
        n = self.model.n
        if len(self.p) != n or len(self.q) != n:
            raise ValueError(f"need {n} p- and q-components")
        for poly in self.p + self.q:
            if poly.n_vars != 2 * n:
                raise ValueError("section components must be polynomials on the base")
            if poly.degree > MAX_SECTION_DEGREE:
                raise ValueError(
                    f"section degree {poly.degree} exceeds the bound {MAX_SECTION_DEGREE}"
                )
        rows = tuple(
            tuple(poly.derivative(j) for j in range(2 * n)) for poly in self.p + self.q
        )
        object.__setattr__(self, "_jac_polys", rows)

    def total_coords(self, base_pt: Point) -> np.ndarray:
        xy = base_pt.coords
        fibre = [poly(xy) for poly in self.p + self.q]
        return np.concatenate([xy, np.asarray(fibre)])

    def evaluate(self, base_pt: Point) -> Point:
        if base_pt.chart != self.model.base_chart:
            raise GeometryError("section evaluated off its base chart")
        return Point(self.model.total_chart, self.total_coords(base_pt))

    def jacobian(self, base_pt: Point) -> np.ndarray:
        """Exact Jacobian (4n x 2n): identity block over polynomial partials."""
        n = self.model.n
        top = np.eye(2 * n)
        bottom = np.array(
            [[d(base_pt.coords) for d in row] for row in self._jac_polys]
        )
        return np.vstack([top, bottom])

    def jacobian_fd(self, base_pt: Point, step: float | None = None) -> np.ndarray:
        h = self.model.base_chart.fd_step() if step is None else float(step)
        n2 = 2 * self.model.n
        cols = []
        for j in range(n2):
            fwd = self.total_coords(base_pt.shifted(j, h))
            bwd = self.total_coords(base_pt.shifted(j, -h))
            cols.append((fwd - bwd) / (2 * h))
        return np.column_stack(cols)


def zero_section(model: FibrationModel) -> SectionMap:
    n2 = 2 * model.n
    zero = Polynomial.zero(n2)
    return SectionMap(model, (zero,) * model.n, (zero,) * model.n, name="zero")


def standard_sigma_section(model: FibrationModel) -> SectionMap:
    """p_i = y_i, q_i = -x_i: Lagrangian for sigma and chi, invariant under J_omega."""
    n, n2 = model.n, 2 * model.n
    p = tuple(Polynomial.coordinate(n2, n + i) for i in range(n))
    q = tuple(Polynomial.coordinate(n2, i).scaled(-1.0) for i in range(n))
    return SectionMap(model, p, q, name="rotation")


def gradient_section(model: FibrationModel, potential: Polynomial, name: str = "") -> SectionMap:
    """p_i = d(potential)/dx_i, q_i = d(potential)/dy_i; always omega-Lagrangian."""
    n = model.n
    if potential.n_vars != 2 * n:
        raise ValueError("potential must live on the base chart")
    p = tuple(potential.derivative(i) for i in range(n))
    q = tuple(potential.derivative(n + i) for i in range(n))
    return SectionMap(model, p, q, name=name or "gradient")


def section_pullback(
    model: FibrationModel,
    section: SectionMap,
    form: DifferentialForm,
    pt: Point,
    fd_step: float | None = None,
) -> dict[tuple[int, int], float]:
    """Coefficient table of the pullback of a total-space 2-form to the base."""
    frame = section.jacobian_fd(pt, fd_step)
    M = form_matrix(form, section.evaluate(pt))
    P = frame.T @ M @ frame
    n2 = 2 * model.n
    return {(i, j): float(P[i, j]) for i in range(n2) for j in range(i + 1, n2)}


def span_invariance_residual(frame: np.ndarray, images: np.ndarray) -> float:
    """Worst distance of an image column from the column span of the frame."""
    if np.linalg.matrix_rank(frame) < frame.shape[1]:
        raise GeometryError("tangent frame is rank deficient")
    worst = 0.0
    for col in range(images.shape[1]):
        target = images[:, col]
        sol, *_ = np.linalg.lstsq(frame, target, rcond=None)
        worst = max(worst, float(np.linalg.norm(frame @ sol - target)))
    return worst


def complex_submanifold_check(
    model: FibrationModel,
    section: SectionMap,
    J: EndomorphismField,
    pt: Point,
    fd_step: float | None = None,
) -> float:
    """How far J moves the graph tangent space off itself at one base point."""
    frame = section.jacobian_fd(pt, fd_step)
    Jmat = J.matrix(section.evaluate(pt))
    return span_invariance_residual(frame, Jmat @ frame)


def cycle_normalization_matrix(
    model: FibrationModel, nodes: int = 32, curve_step: float = 1e-6
) -> np.ndarray:
    """Quadrature of each angle differential around each lattice cycle.

    Entry (i, k) is the integral of the k-th angle coordinate differential
    along lattice cycle i, divided by the k-th period, evaluated by
    Gauss-Legendre quadrature with the curve velocity taken by central
    differences.  The exact answer is the identity: cycle i advances only its
    own angle, once per period.
    """
    from numpy.polynomial.legendre import leggauss

    theta, weights = leggauss(nodes)
    chart = model.total_chart
    anchor = (np.asarray(chart.lower) + np.asarray(chart.upper)) / 2.0
    m = len(model.lattice_basis)
    out = np.zeros((m, m))
    for i, cycle in enumerate(model.lattice_basis):
        lo = chart.lower[cycle.axis]

        def curve(t: float) -> np.ndarray:
            coords = anchor.copy()
            coords[cycle.axis] = lo + cycle.period * t / (2.0 * math.pi)
            return coords

        for t_node, w in zip(math.pi * (theta + 1.0), weights):
            velocity = (curve(t_node + curve_step) - curve(t_node - curve_step)) / (
                2.0 * curve_step
            )
            for k, other in enumerate(model.lattice_basis):
                # the k-th angle differential picks one velocity component
                out[i, k] += w * math.pi * velocity[other.axis] / other.period
    return out
