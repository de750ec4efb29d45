"""Action-angle variables for products of 1-DOF harmonic oscillators.

State layout for an m-factor product is (xi_1..xi_m, pi_1..pi_m).  Each
factor has H = (pi^2 + nu^2 xi^2)/2; on the level curve of energy E the
closed-form action is E/nu and the angle atan2(nu xi, pi) advances at rate nu
under the flow.  The quadrature routines below recover these facts
numerically (Gauss-Legendre along the parametrized level curve) so they can
serve as oracles for the closed forms rather than restatements of them.

A product with an even number of factors doubles as a fibration model: the
first half of the actions become the x-coordinates and the second half the
y-coordinates, with action windows obtained from an energy window factor by
factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOrbitError
from .fibration import FibrationModel, make_model
from .structures import TOL_FD, CheckReport

TWO_PI = 2.0 * math.pi
MIN_QUADRATURE_NODES = 16
DEFAULT_ENERGY_WINDOW = (0.2, 2.0)


@dataclass(frozen=True)
class Oscillator1DOF:
    frequency: float

    def __post_init__(self) -> None:
        if not self.frequency > 0:
            raise ValueError(f"frequency must be positive, got {self.frequency}")

    def hamiltonian(self, xi: float, pi: float) -> float:
        return 0.5 * (pi * pi + self.frequency**2 * xi * xi)

    def level_curve(self, energy: float, t: float) -> tuple[float, float]:
        """Point on the energy-E orbit at angle t (the parameter IS the angle)."""
        if energy <= 0:
            raise DegenerateOrbitError(
                f"no closed orbit at energy {energy}; need a positive energy level"
            )
        r = math.sqrt(2.0 * energy)
        return r / self.frequency * math.sin(t), r * math.cos(t)

    def angle_gradient(self, xi: float, pi: float) -> tuple[float, float]:
        """d(angle) as a covector at (xi, pi); undefined at the equilibrium."""
        denom = pi * pi + self.frequency**2 * xi * xi
        if denom <= 0:
            raise DegenerateOrbitError("angle gradient undefined at the equilibrium")
        return self.frequency * pi / denom, -self.frequency * xi / denom


def action_from_energy(osc: Oscillator1DOF, energy: float, nodes: int = 64) -> float:
    """(1/2pi) * loop integral of pi d(xi) over the level curve, by quadrature."""
    if nodes < MIN_QUADRATURE_NODES:
        raise ValueError(f"need at least {MIN_QUADRATURE_NODES} nodes, got {nodes}")
    if energy <= 0:
        raise DegenerateOrbitError(
            f"no closed orbit at energy {energy}; need a positive energy level"
        )
    u, w = np.polynomial.legendre.leggauss(nodes)
    t = math.pi * (u + 1.0)
    r = math.sqrt(2.0 * energy)
    momentum = r * np.cos(t)
    velocity = r / osc.frequency * np.cos(t)  # d(xi)/dt on the parametrized orbit
    return float(np.sum(w * momentum * velocity) * math.pi / TWO_PI)


def angle_period_check(osc: Oscillator1DOF, energy: float, nodes: int = 128) -> float:
    """|(1/2pi) * loop integral of d(angle) - 1| over one level curve."""
    if nodes < MIN_QUADRATURE_NODES:
        raise ValueError(f"need at least {MIN_QUADRATURE_NODES} nodes, got {nodes}")
    u, w = np.polynomial.legendre.leggauss(nodes)
    t = math.pi * (u + 1.0)
    r = math.sqrt(2.0 * energy)
    total = 0.0
    for tk, wk in zip(t, w):
        xi, pi = osc.level_curve(energy, tk)
        gxi, gpi = osc.angle_gradient(xi, pi)
        vel_xi = r / osc.frequency * math.cos(tk)
        vel_pi = -r * math.sin(tk)
        total += wk * (gxi * vel_xi + gpi * vel_pi)
    return abs(total * math.pi / TWO_PI - 1.0)


@dataclass(frozen=True)
class ProductSystem:
    oscillators: tuple[Oscillator1DOF, ...]

    def __post_init__(self) -> None:
        count = len(self.oscillators)
        if count < 2 or count % 2 != 0:
            raise ValueError(
                f"a product system needs an even number (>= 2) of factors, got {count}"
            )

    @classmethod
    def from_frequencies(cls, frequencies) -> "ProductSystem":
        return cls(tuple(Oscillator1DOF(float(f)) for f in frequencies))

    @property
    def dof(self) -> int:
        return len(self.oscillators)

    def split_state(self, state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        state = np.asarray(state, dtype=float)
        if state.shape != (2 * self.dof,):
            raise ValueError(
                f"state must have shape ({2 * self.dof},), got {state.shape}"
            )
        return state[: self.dof], state[self.dof :]


def to_action_angle(sys: ProductSystem, state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    xi, pi = sys.split_state(state)
    actions = np.empty(sys.dof)
    angles = np.empty(sys.dof)
    for k, osc in enumerate(sys.oscillators):
        energy = osc.hamiltonian(xi[k], pi[k])
        if energy <= 0:
            raise DegenerateOrbitError(
                f"factor {k} sits at the equilibrium; action-angle chart undefined"
            )
        actions[k] = energy / osc.frequency
        angles[k] = math.atan2(osc.frequency * xi[k], pi[k]) % TWO_PI
    return actions, angles


def from_action_angle(
    sys: ProductSystem, actions: np.ndarray, angles: np.ndarray
) -> np.ndarray:
    actions = np.asarray(actions, dtype=float)
    angles = np.asarray(angles, dtype=float)
    if actions.shape != (sys.dof,) or angles.shape != (sys.dof,):
        raise ValueError(f"expected {sys.dof} actions and angles")
    if np.any(actions <= 0):
        raise DegenerateOrbitError("actions must be positive away from the equilibrium")
    state = np.empty(2 * sys.dof)
    for k, osc in enumerate(sys.oscillators):
        nu = osc.frequency
        state[k] = math.sqrt(2.0 * actions[k] / nu) * math.sin(angles[k])
        state[sys.dof + k] = math.sqrt(2.0 * actions[k] * nu) * math.cos(angles[k])
    return state


def _wrap_angle_difference(delta: np.ndarray) -> np.ndarray:
    return (delta + math.pi) % TWO_PI - math.pi


def transform_jacobian(
    sys: ProductSystem, state: np.ndarray, step: float = 1e-6
) -> np.ndarray:
    """Central-difference Jacobian of state -> (actions, angles).

    Angle rows use wrapped differences so the branch cut of the angle chart
    does not poison the derivative.
    """
    state = np.asarray(state, dtype=float)
    dim = 2 * sys.dof
    jac = np.empty((dim, dim))
    for j in range(dim):
        bumped = state.copy()
        bumped[j] += step
        act_plus, ang_plus = to_action_angle(sys, bumped)
        bumped[j] -= 2.0 * step
        act_minus, ang_minus = to_action_angle(sys, bumped)
        jac[: sys.dof, j] = (act_plus - act_minus) / (2.0 * step)
        jac[sys.dof :, j] = _wrap_angle_difference(ang_plus - ang_minus) / (2.0 * step)
    return jac


def sample_states(
    sys: ProductSystem,
    n_points: int = 100,
    seed: int = 42,
    energy_window: tuple[float, float] = DEFAULT_ENERGY_WINDOW,
) -> list[np.ndarray]:
    """Seeded states with per-factor energies inside the window."""
    lo, hi = energy_window
    if not 0 < lo < hi:
        raise ValueError(f"energy window must satisfy 0 < lo < hi, got {energy_window}")
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(n_points):
        energies = rng.uniform(lo, hi, size=sys.dof)
        angles = rng.uniform(0.0, TWO_PI, size=sys.dof)
        actions = energies / np.array([o.frequency for o in sys.oscillators])
        states.append(from_action_angle(sys, actions, angles))
    return states


def round_trip_residual(sys: ProductSystem, states) -> float:
    worst = 0.0
    for state in states:
        rebuilt = from_action_angle(sys, *to_action_angle(sys, state))
        worst = max(worst, float(np.max(np.abs(rebuilt - state))))
    return worst


def canonical_check(
    sys: ProductSystem,
    n_points: int = 100,
    seed: int = 42,
    step: float = 1e-6,
    energy_window: tuple[float, float] = DEFAULT_ENERGY_WINDOW,
    tolerance: float = TOL_FD,
) -> CheckReport:
    """Pull sum d(angle_k) ^ d(action_k) back through the transform and compare
    with sum d(xi_k) ^ d(pi_k) on the mechanical side."""
    m = sys.dof
    target = np.zeros((2 * m, 2 * m))
    mechanical = np.zeros((2 * m, 2 * m))
    for k in range(m):
        target[k, m + k] = -1.0  # (d angle ^ d action)(e_action, e_angle) = -1
        target[m + k, k] = 1.0
        mechanical[k, m + k] = 1.0
        mechanical[m + k, k] = -1.0
    worst = 0.0
    for state in sample_states(sys, n_points, seed, energy_window):
        jac = transform_jacobian(sys, state, step)
        pulled = jac.T @ target @ jac
        worst = max(worst, float(np.max(np.abs(pulled - mechanical))))
    return CheckReport.from_residual(
        "action_angle.canonical_transform",
        n_points,
        worst,
        tolerance,
        statement=(
            "the action-angle map pulls the angle-action symplectic form back to "
            "the mechanical one"
        ),
    )


def angle_cycle_matrix(
    sys: ProductSystem, energies, nodes: int = 64, park_offset: float = 0.3
) -> np.ndarray:
    """Period matrix (1/2pi) * integral of d(angle_i) over cycle_j.

    Cycle j runs factor j once around its level curve while the other factors
    sit parked at fixed points of their own curves; the result should be the
    identity, and the off-diagonal zeros fall out of the quadrature rather
    than being assumed.
    """
    energies = np.asarray(energies, dtype=float)
    if energies.shape != (sys.dof,):
        raise ValueError(f"need one energy per factor, got shape {energies.shape}")
    u, w = np.polynomial.legendre.leggauss(nodes)
    t = math.pi * (u + 1.0)
    matrix = np.zeros((sys.dof, sys.dof))
    for j in range(sys.dof):
        r = math.sqrt(2.0 * energies[j])
        for tk, wk in zip(t, w):
            for i, osc in enumerate(sys.oscillators):
                if i == j:
                    xi, pi = osc.level_curve(energies[i], tk)
                    vel = (r / osc.frequency * math.cos(tk), -r * math.sin(tk))
                else:
                    xi, pi = osc.level_curve(energies[i], park_offset * (i + 1))
                    vel = (0.0, 0.0)
                gxi, gpi = osc.angle_gradient(xi, pi)
                matrix[i, j] += wk * (gxi * vel[0] + gpi * vel[1])
    return matrix * math.pi / TWO_PI


def model_from_product_system(
    sys: ProductSystem,
    energy_window: tuple[float, float] = DEFAULT_ENERGY_WINDOW,
    name: str = "oscillator-model",
) -> FibrationModel:
    """Fibration model over the action box of the product system.

    The first half of the factors supply the x-coordinates and the second
    half the y-coordinates; each action window is the energy window divided
    by that factor's frequency.
    """
    lo, hi = energy_window
    if not 0 < lo < hi:
        raise ValueError(f"energy window must satisfy 0 < lo < hi, got {energy_window}")
    bounds = [
        (lo / osc.frequency, hi / osc.frequency) for osc in sys.oscillators
    ]
    return make_model(sys.dof // 2, action_bounds=bounds, name=name)


def verify_action_angle(
    sys: ProductSystem,
    n_points: int = 100,
    seed: int = 42,
    tol_quadrature: float = 1e-8,
    tol_algebraic: float = 1e-12,
    tol_fd: float = TOL_FD,
) -> list[CheckReport]:
    """The full oscillator battery as a sorted list of reports."""
    energies = (0.2, 0.5, 1.0, 2.0)
    worst = max(
        abs(action_from_energy(osc, e) - e / osc.frequency)
        for osc in sys.oscillators
        for e in energies
    )
    reports = [
        CheckReport.from_residual(
            "action_angle.action_equals_energy_over_frequency",
            len(energies) * sys.dof,
            worst,
            tol_quadrature,
            statement="quadrature of the action integral matches energy / frequency",
        )
    ]

    worst = max(
        angle_period_check(osc, e) for osc in sys.oscillators for e in (0.5, 1.0)
    )
    reports.append(
        CheckReport.from_residual(
            "action_angle.angle_normalization",
            2 * sys.dof,
            worst,
            tol_quadrature,
            statement="the angle advances by exactly one turn around each level curve",
        )
    )

    cycle_energies = np.linspace(0.4, 1.6, sys.dof)
    residual = float(
        np.max(np.abs(angle_cycle_matrix(sys, cycle_energies) - np.eye(sys.dof)))
    )
    reports.append(
        CheckReport.from_residual(
            "action_angle.cycle_matrix_identity",
            sys.dof,
            residual,
            tol_quadrature,
            statement="the period matrix of the angle differentials is the identity",
        )
    )

    states = sample_states(sys, n_points, seed)
    reports.append(
        CheckReport.from_residual(
            "action_angle.round_trip",
            n_points,
            round_trip_residual(sys, states),
            tol_algebraic,
            statement="to_action_angle and from_action_angle invert each other",
        )
    )

    reports.append(canonical_check(sys, n_points, seed, tolerance=tol_fd))
    return sorted(reports, key=lambda r: r.identity_name)
