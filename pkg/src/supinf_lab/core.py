"""Shared numeric vocabulary: exponents, radial grids, sampled profiles, regions.

Sign convention
---------------
Equations are stored in classical form ``-Lap u = RHS`` where ``Lap`` is the
Euclidean Laplacian ``sum d^2/dx_i^2``.  The positive operator written
``Delta = -nabla^i nabla_i`` in the analysis literature is exactly
:func:`minus_laplacian` below; every residual in the package goes through it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Literal

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DimensionError, DomainError

MIN_NODES = 8
DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class Exponents:
    """Exact rational exponents attached to a dimension ``n >= 3``."""

    n: int
    critical: Fraction
    subcritical: Fraction
    half_power: Fraction
    l_const: Fraction

    @property
    def p(self) -> float:
        return float(self.critical)

    @property
    def q(self) -> float:
        return float(self.subcritical)

    @property
    def k(self) -> float:
        return float(self.half_power)

    @property
    def sobolev_n(self) -> Fraction:
        """``N = 2n/(n-2)``, so that ``N - 1`` is the critical exponent."""
        return Fraction(2 * self.n, self.n - 2)


def make_exponents(n: int) -> Exponents:
    if isinstance(n, bool) or int(n) != n:
        raise DimensionError(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if n < 3:
        raise DimensionError(f"dimension must be >= 3, got {n}")
    half = Fraction(n - 2, 2)
    return Exponents(
        n=n,
        critical=Fraction(n + 2, n - 2),
        subcritical=Fraction(n, n - 2),
        half_power=half,
        l_const=half * half,
    )


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing radii.

    Grids built by :func:`uniform_grid` and :func:`geometric_grid` start at 0.
    Images of Emden-Fowler grids start at ``e^{t_min} > 0``; those are flagged
    by ``starts_at_origin``.
    """

    nodes: np.ndarray
    policy: Literal["uniform", "geometric", "image"] = "uniform"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < MIN_NODES:
            raise DomainError(f"a radial grid needs at least {MIN_NODES} nodes")
        if nodes[0] < 0 or not np.all(np.isfinite(nodes)):
            raise DomainError("radial nodes must be finite and >= 0")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError("radial nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    def __len__(self):
        return self.nodes.size

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def starts_at_origin(self) -> bool:
        return self.nodes[0] == 0.0

    @cached_property
    def step(self) -> float | None:
        """Common spacing for uniform grids, else ``None``."""
        d = np.diff(self.nodes)
        h = (self.nodes[-1] - self.nodes[0]) / (self.nodes.size - 1)
        if np.max(np.abs(d - h)) <= 1e-9 * max(h, 1e-300) + 1e-12 * self.r_max:
            return float(h)
        return None


def uniform_grid(r_max: float, step: float = DEFAULT_STEP, r_min: float = 0.0) -> RadialGrid:
    """Uniform grid on ``[r_min, r_min + N*step]`` with ``N = round((r_max - r_min)/step)``."""
    if step <= 0 or r_max <= r_min:
        raise DomainError("uniform grid needs step > 0 and r_max > r_min")
    count = int(round((r_max - r_min) / step))
    nodes = r_min + np.arange(count + 1) * step
    return RadialGrid(nodes, "uniform")


def geometric_grid(r_max: float, first_step: float, growth: float = 1.01,
                   max_step: float | None = None) -> RadialGrid:
    """Grid refined near the origin: spacing starts at ``first_step`` and grows
    by ``growth`` per node, capped at ``max_step``; the last node is ``r_max``."""
    if not (first_step > 0 and growth >= 1.0 and r_max > first_step):
        raise DomainError("geometric grid needs 0 < first_step < r_max and growth >= 1")
    cap = max_step if max_step is not None else np.inf
    nodes = [0.0]
    h = first_step
    while nodes[-1] + h < r_max:
        nodes.append(nodes[-1] + h)
        h = min(h * growth, cap)
    if r_max - nodes[-1] < 0.25 * h and len(nodes) > 1:
        nodes[-1] = r_max
    else:
        nodes.append(r_max)
    return RadialGrid(np.array(nodes), "geometric")


def minus_laplacian(values: np.ndarray, grid: RadialGrid, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Second-order central-difference ``-Lap u`` for a radial profile.

    Returns ``(index, value)`` for the nodes where the stencil is defined: all
    nodes but the last, plus the first only when the grid starts at 0 (where
    the regularised form ``-n u''(0)`` with the even extension is used).
    Requires a uniform grid.
    """
    h = grid.step
    if h is None:
        raise DomainError("finite-difference residuals need a uniform grid")
    u = np.asarray(values, dtype=float)
    r = grid.nodes
    inner = np.arange(1, u.size - 1)
    lap = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h**2 + (n - 1) / r[1:-1] * (u[2:] - u[:-2]) / (2.0 * h)
    if grid.starts_at_origin:
        lap0 = n * 2.0 * (u[1] - u[0]) / h**2
        return np.concatenate(([0], inner)), -np.concatenate(([lap0], lap))
    return inner, -lap


@dataclass(frozen=True, eq=False)
class SolutionProfile:
    """Positive radial samples ``u(r)`` with the equation they are meant to solve.

    ``curvature`` is the :class:`~supinf_lab.curvature.CurvatureProfile` of the
    equation (``None`` for closed-form samples whose equation is implied).
    """

    grid: RadialGrid
    values: np.ndarray
    exponents: Exponents
    has_subcritical_term: bool = False
    curvature: Any = None
    ball_radius: float | None = None
    meta: dict = field(default_factory=dict)
    # coefficient of u^{n/(n-2)}; rescaled profiles carry u(y)^{-2/(n-2)}
    subcritical_coeff: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise DomainError("profile values must be defined on every grid node")
        if not np.all(values > 0):
            raise DomainError("profile values must be strictly positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.ball_radius is None:
            object.__setattr__(self, "ball_radius", self.grid.r_max)
        elif self.ball_radius > self.grid.r_max * (1 + 1e-12):
            raise DomainError("ball radius exceeds the sampled range")

    @property
    def n(self) -> int:
        return self.exponents.n

    @property
    def r(self) -> np.ndarray:
        return self.grid.nodes

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.grid.nodes, self.values)

    def rhs(self, r: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Right-hand side ``V u^p (+ u^q)`` of the stored equation."""
        V = self.curvature.value(r) if self.curvature is not None else self.n * (self.n - 2)
        out = V * u ** self.exponents.p
        if self.has_subcritical_term:
            out = out + self.subcritical_coeff * u ** self.exponents.q
        return out


def eval_profile(p: SolutionProfile, r):
    """Cubic-spline value of ``p`` at radius ``r`` (scalar or array).

    Stored values are returned verbatim at grid nodes.  Radii outside the
    sampled range raise :class:`DomainError`; nothing is extrapolated.
    """
    scalar = np.ndim(r) == 0
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    nodes = p.grid.nodes
    span = nodes[-1] - nodes[0]
    slack = 1e-12 * max(span, 1.0)
    if np.any(rr < nodes[0] - slack) or np.any(rr > nodes[-1] + slack):
        raise DomainError(f"radius outside sampled range [{nodes[0]}, {nodes[-1]}]")
    rr = np.clip(rr, nodes[0], nodes[-1])
    out = p._spline(rr)
    idx = np.clip(np.searchsorted(nodes, rr), 0, nodes.size - 1)
    hit = nodes[idx] == rr
    out[hit] = p.values[idx[hit]]
    return float(out[0]) if scalar else out


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values on strictly increasing abscissae, with no sign constraint."""

    x: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        x = np.asarray(self.x)
        v = np.asarray(self.values)
        # extended precision is kept: second differences amplify rounding
        x = x if x.dtype in (np.float64, np.longdouble) else x.astype(float)
        v = v if v.dtype in (np.float64, np.longdouble) else v.astype(float)
        if x.shape != v.shape or x.ndim != 1:
            raise DomainError("abscissae and values must be 1-D arrays of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.x.size

    def max(self) -> float:
        return float(self.values.max())

    def min(self) -> float:
        return float(self.values.min())


@dataclass(frozen=True)
class RegionSpec:
    """Ball or annulus in R^n, stored through the distance of its centre to the origin."""

    kind: Literal["ball", "annulus"]
    center: float = 0.0
    inner: float = 0.0
    outer: float = 1.0

    def __post_init__(self):
        if self.kind not in ("ball", "annulus"):
            raise DomainError(f"unknown region kind {self.kind!r}")
        if self.kind == "ball" and self.inner != 0.0:
            raise DomainError("a ball has inner radius 0")
        if not (0.0 <= self.inner < self.outer) or self.center < 0:
            raise DomainError("region needs 0 <= inner < outer and center >= 0")

    def radial_range(self) -> tuple[float, float]:
        """Interval of ``|x|`` swept by the region."""
        lo = max(0.0, self.center - self.outer, self.inner - self.center)
        return lo, self.center + self.outer


def ball(radius: float, center: float = 0.0) -> RegionSpec:
    return RegionSpec("ball", center, 0.0, radius)


def annulus(inner: float, outer: float) -> RegionSpec:
    return RegionSpec("annulus", 0.0, inner, outer)


def extremum_on(p: SolutionProfile, region: RegionSpec, which: Literal["sup", "inf"]) -> float:
    """Sup or inf of ``p`` over ``region``, taken over grid nodes in the region,
    the interpolant at midpoints between consecutive such nodes and at the
    two boundary radii.

    A resolution-limited estimate: no continuous optimisation is attempted.
    """
    if which not in ("sup", "inf"):
        raise ValueError("which must be 'sup' or 'inf'")
    lo, hi = region.radial_range()
    if hi > p.ball_radius * (1 + 1e-12):
        raise DomainError(f"region reaches radius {hi} beyond the ball radius {p.ball_radius}")
    nodes = p.grid.nodes
    slack = 1e-12 * max(hi, 1.0)
    mask = (nodes >= lo - slack) & (nodes <= hi + slack)
    if not np.any(mask):
        raise DomainError(f"no grid node inside radii [{lo}, {hi}]")
    vals = p.values[mask]
    sel = nodes[mask]
    if sel.size > 1:
        mids = eval_profile(p, 0.5 * (sel[1:] + sel[:-1]))
        vals = np.concatenate((vals, mids))
    # the region's own boundary radii, which need not be nodes
    ends = np.clip([lo, hi], nodes[0], nodes[-1])
    vals = np.concatenate((vals, eval_profile(p, ends)))
    return float(vals.max() if which == "sup" else vals.min())
