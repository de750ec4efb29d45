"""Coordinate charts on box domains, points, and evaluator-backed fields.

A chart is a named box ``[lower_i, upper_i]`` with named coordinates.  All
fields are represented by plain evaluators (point -> value); nothing is
symbolic.  Evaluators must be deterministic: the same point yields the same
value bit for bit, which the report layer relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ChartMismatchError


@dataclass(frozen=True)
class Chart:
    name: str
    coords: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.coords:
            raise ValueError("chart needs at least one coordinate")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError("duplicate coordinate names")
        if len(self.lower) != len(self.coords) or len(self.upper) != len(self.coords):
            raise ValueError("box bounds must match the coordinate count")
        for name, lo, hi in zip(self.coords, self.lower, self.upper):
            if not lo < hi:
                raise ValueError(f"empty box on axis {name}: [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def axis(self, coord: str) -> int:
        try:
            return self.coords.index(coord)
        except ValueError:
            raise KeyError(f"chart {self.name!r} has no coordinate {coord!r}") from None

    def widths(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    def fd_step(self) -> float:
        """Default central-difference step: 1e-5 scaled by the widest half-axis."""
        return 1e-5 * float(np.max(self.widths())) / 2.0

    def point(self, coords: Sequence[float]) -> "Point":
        arr = np.asarray(coords, dtype=float)
        if arr.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} coordinates, got shape {arr.shape}")
        return Point(self, arr)

    def contains(self, coords: np.ndarray) -> bool:
        return bool(
            np.all(coords >= np.asarray(self.lower))
            and np.all(coords <= np.asarray(self.upper))
        )

    def sample(self, n_points: int = 100, seed: int = 42) -> list["Point"]:
        """Uniform draws from the box; seeded so every suite sees the same set."""
        rng = np.random.default_rng(seed)
        draws = rng.uniform(self.lower, self.upper, size=(n_points, self.dim))
        return [Point(self, row) for row in draws]


@dataclass(frozen=True, eq=False)
class Point:
    chart: Chart
    coords: np.ndarray

    def shifted(self, axis: int, delta: float) -> "Point":
        moved = self.coords.copy()
        moved[axis] += delta
        return Point(self.chart, moved)

    def __repr__(self) -> str:  # keeps test failure output readable
        inside = ", ".join(f"{n}={v:.6g}" for n, v in zip(self.chart.coords, self.coords))
        return f"Point({self.chart.name}: {inside})"


def require_same_chart(a: Chart, b: Chart) -> None:
    if a != b:
        raise ChartMismatchError(f"chart mismatch: {a.name!r} vs {b.name!r}")


@dataclass(frozen=True)
class ScalarField:
    chart: Chart
    fn: Callable[[Point], float]
    name: str = ""

    def __call__(self, pt: Point) -> float:
        require_same_chart(self.chart, pt.chart)
        return float(self.fn(pt))


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    fn: Callable[[Point], np.ndarray]
    name: str = ""

    def __call__(self, pt: Point) -> np.ndarray:
        require_same_chart(self.chart, pt.chart)
        value = np.asarray(self.fn(pt), dtype=float)
        if value.shape != (self.chart.dim,):
            raise ValueError(f"vector field {self.name!r} returned shape {value.shape}")
        return value

    @classmethod
    def constant(cls, chart: Chart, components: Sequence[float], name: str = "") -> "VectorField":
        frozen = np.asarray(components, dtype=float).copy()
        if frozen.shape != (chart.dim,):
            raise ValueError("component count does not match the chart dimension")
        return cls(chart, lambda pt: frozen, name=name)


@dataclass(frozen=True)
class CovectorField:
    chart: Chart
    fn: Callable[[Point], np.ndarray]
    name: str = ""

    def __call__(self, pt: Point) -> np.ndarray:
        require_same_chart(self.chart, pt.chart)
        value = np.asarray(self.fn(pt), dtype=float)
        if value.shape != (self.chart.dim,):
            raise ValueError(f"covector field {self.name!r} returned shape {value.shape}")
        return value


def frame_field(chart: Chart, axis: int, name: str = "") -> VectorField:
    """The coordinate frame vector field along one axis."""
    e = np.zeros(chart.dim)
    e[axis] = 1.0
    return VectorField(chart, lambda pt: e, name=name or f"d/d{chart.coords[axis]}")


def coordinate_function(chart: Chart, axis: int) -> ScalarField:
    return ScalarField(chart, lambda pt: pt.coords[axis], name=chart.coords[axis])
