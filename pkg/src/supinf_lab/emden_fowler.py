"""Cylindrical (Emden-Fowler) coordinates ``w(t) = e^{(n-2)t/2} u(y + e^t)``.

For a radial solution about ``y`` the transformed function satisfies

    -L w = V(y + e^t) w^{(n+2)/(n-2)} + e^t w^{n/(n-2)},   L = d_tt - (n-2)^2/4

(the spherical Laplacian drops out in the radial setting).  ``L`` is
discretised with the exponentially fitted second difference

    (w[k+1] - 2 w[k] + w[k-1]) / h^2 - (2 sinh(kappa h / 2) / h)^2 w[k],  kappa = (n-2)/2,

which is second-order consistent with ``L`` and annihilates ``e^{+-kappa t}``
exactly, so the kernel identities used by the moving-plane arguments hold on
the grid up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline

from .core import (MIN_NODES, Exponents, RadialGrid, SampledFunction, SolutionProfile,
                   eval_profile)
from .errors import DomainError

T_MAX = -math.log(2.0)


def _as_real(a) -> np.ndarray:
    a = np.asarray(a)
    return a if a.dtype in (np.float64, np.longdouble) else a.astype(float)


@dataclass(frozen=True, eq=False)
class EFProfile:
    """Positive ``w`` on a uniform ``t`` grid, expanded about the radial point ``origin``.

    ``t_max <= -log 2`` is the analysis domain; :func:`to_ef` enforces it unless
    asked for an extended (test) grid.
    """

    t_nodes: np.ndarray
    w_values: np.ndarray
    origin: float
    exponents: Exponents
    curvature: Any = None
    include_subcritical: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = _as_real(self.t_nodes)
        w = _as_real(self.w_values)
        if t.ndim != 1 or t.shape != w.shape:
            raise DomainError("t nodes and w values must be 1-D and of equal length")
        if t.size < MIN_NODES:
            raise DomainError(f"an EF profile needs at least {MIN_NODES} nodes")
        d = np.diff(t)
        h = (t[-1] - t[0]) / (t.size - 1)
        if h <= 0 or np.max(np.abs(d - h)) > 1e-9 * h:
            raise DomainError("t nodes must be uniformly spaced and increasing")
        if not np.all(w > 0):
            raise DomainError("w must be strictly positive")
        t.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "t_nodes", t)
        object.__setattr__(self, "w_values", w)

    # uniform access shared with SampledFunction
    @property
    def x(self) -> np.ndarray:
        return self.t_nodes

    @property
    def values(self) -> np.ndarray:
        return self.w_values

    @property
    def n(self) -> int:
        return self.exponents.n

    @property
    def h(self) -> float:
        t = self.t_nodes
        return float((t[-1] - t[0]) / (t.size - 1))

    @property
    def t_min(self) -> float:
        return float(self.t_nodes[0])

    @property
    def t_max(self) -> float:
        return float(self.t_nodes[-1])

    @cached_property
    def spline(self) -> CubicSpline:
        return CubicSpline(self.t_nodes, self.w_values)

    def curvature_bar(self, t):
        """``V(origin + e^t)``, evaluated from the family in closed form."""
        if self.curvature is None:
            raise DomainError("this EF profile carries no curvature")
        return self.curvature.value(self.origin + np.exp(np.asarray(t, dtype=float)))


def to_ef(p: SolutionProfile, origin: float, t_min: float, t_max: float, m_nodes: int,
          allow_extended: bool = False) -> EFProfile:
    if m_nodes < MIN_NODES or not t_min < t_max:
        raise DomainError(f"need t_min < t_max and at least {MIN_NODES} nodes")
    if t_max > T_MAX + 1e-14 and not allow_extended:
        raise DomainError(f"t_max = {t_max} exceeds -log 2")
    if origin < 0:
        raise DomainError("origin must be a radius >= 0")
    if origin + math.exp(t_max) > p.ball_radius * (1 + 1e-12):
        raise DomainError(
            f"origin + e^t_max = {origin + math.exp(t_max)} leaves the ball of radius {p.ball_radius}")
    t = np.linspace(t_min, t_max, m_nodes)
    k = p.exponents.k
    w = np.exp(k * t) * eval_profile(p, origin + np.exp(t))
    return EFProfile(t, w, origin, p.exponents, p.curvature, p.has_subcritical_term,
                     meta={"source": p.meta.get("source"), "ball_radius": p.ball_radius})


def from_ef(w: EFProfile) -> SolutionProfile:
    """Inverse transform on the image radii ``origin + e^t``."""
    r = np.exp(w.t_nodes)
    u = r ** -w.exponents.k * w.w_values
    return SolutionProfile(
        grid=RadialGrid(w.origin + r, "image"),
        values=u,
        exponents=w.exponents,
        has_subcritical_term=w.include_subcritical,
        curvature=w.curvature,
        meta={"source": "from_ef", "origin": w.origin},
    )


def fitted_shift(n: int, h: float) -> float:
    """Discrete counterpart of ``(n-2)^2/4``: ``(2 sinh(kappa h/2)/h)^2``."""
    kappa = (n - 2) / 2
    return (2.0 * math.sinh(0.5 * kappa * h) / h) ** 2


def _apply_L_values(t: np.ndarray, v: np.ndarray, n: int) -> SampledFunction:
    if t.size < MIN_NODES:
        raise DomainError(f"need at least {MIN_NODES} nodes")
    # the stencil multiplies rounding by h^-2: evaluate it in extended precision
    t = np.asarray(t, dtype=np.longdouble)
    v = np.asarray(v, dtype=np.longdouble)
    h = (t[-1] - t[0]) / (t.size - 1)
    kappa = np.longdouble(n - 2) / 2
    c = (2 * np.sinh(kappa * h / 2) / h) ** 2
    d2 = ((v[2:] - v[1:-1]) - (v[1:-1] - v[:-2])) / (h * h)
    return SampledFunction(t[1:-1].astype(float), (d2 - c * v[1:-1]).astype(float), "Lw")


def apply_L(w, n: int | None = None) -> SampledFunction:
    """Discrete ``L w`` at interior nodes (boundary nodes excluded).

    ``w`` is an :class:`EFProfile` or any field on a uniform grid; for the
    latter pass the dimension ``n``.
    """
    if n is None:
        n = w.n
    return _apply_L_values(np.asarray(w.x), np.asarray(w.values), n)


def ef_residual(w: EFProfile, V, include_subcritical: bool) -> float:
    """Max over interior nodes of ``|-Lw - V(origin+e^t) w^p - [flag] e^t w^q|``.

    Meaningful for profiles that are radial about ``origin`` (``origin = 0``
    for radial solutions); expansions about other points pick up an angular
    term that the radial artifact does not model.
    """
    Lw = apply_L(w)
    t = Lw.x
    wi = w.w_values[1:-1]
    rhs = V.value(w.origin + np.exp(t)) * wi ** w.exponents.p
    if include_subcritical:
        rhs = rhs + np.exp(t) * wi ** w.exponents.q
    return float(np.max(np.abs(-Lw.values - rhs)))


def uniform_t(w: EFProfile) -> np.ndarray:
    """The ideal lattice ``t_min + j h`` in extended precision.

    Float64 ``linspace`` nodes carry ~1e-16 jitter; exponentials sampled on
    them pick up relative noise that the ``h^-2`` of the stencil amplifies.
    """
    t = w.t_nodes
    t0, t1 = np.longdouble(t[0]), np.longdouble(t[-1])
    return t0 + np.arange(t.size, dtype=np.longdouble) * ((t1 - t0) / (t.size - 1))


def shift_profile(w: EFProfile, m: float) -> SampledFunction:
    """``w - (m/2) e^t`` (dimension 4 only); may change sign."""
    if w.n != 4:
        raise DomainError("the shifted profile is defined in dimension 4 only")
    if not m > 0:
        raise DomainError("m must be positive")
    shifted = np.asarray(w.w_values, dtype=np.longdouble) - np.longdouble(m) / 2 * np.exp(uniform_t(w))
    return SampledFunction(w.t_nodes, shifted, "w_bar")
