"""Standard bubble ``(1 + |y|^2)^{-(n-2)/2}`` and its scaling family.

The bubble solves ``-Lap v = n(n-2) v^{(n+2)/(n-2)}`` on R^n, and so does every
rescaling ``u_lam(r) = lam^{(n-2)/2} v(lam r)``.  These closed forms are the
oracles for the numerical modules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (MIN_NODES, RadialGrid, SolutionProfile, make_exponents,
                   minus_laplacian, uniform_grid)
from .curvature import CurvatureProfile
from .errors import DomainError


@dataclass(frozen=True)
class BubbleParams:
    """Scale ``lam`` and centre offset of a bubble in dimension ``n``.

    A nonzero ``center_offset`` places the bubble centre on the sampled ray at
    that distance from the origin; samples then follow the distance to the
    bubble's own centre along the ray.
    """

    n: int
    lam: float = 1.0
    center_offset: float = 0.0

    def __post_init__(self):
        make_exponents(self.n)
        if not self.lam > 0:
            raise DomainError(f"bubble scale must be positive, got {self.lam}")
        if self.center_offset < 0:
            raise DomainError("center_offset must be >= 0")

    @property
    def center_value(self) -> float:
        return self.lam ** ((self.n - 2) / 2)


def bubble_eval(y_norm, n: int):
    exps = make_exponents(n)
    y = np.asarray(y_norm, dtype=float)
    out = (1.0 + y * y) ** (-exps.k)
    return float(out) if out.ndim == 0 else out


def bubble_family_eval(r, params: BubbleParams):
    k = (params.n - 2) / 2
    d = np.abs(np.asarray(r, dtype=float) - params.center_offset)
    lam = params.lam
    out = lam ** k * (1.0 + (lam * d) ** 2) ** (-k)
    return float(out) if out.ndim == 0 else out


def bubble_derivatives(r, params: BubbleParams):
    """Analytic ``(u, u', u'')`` of the centred family member."""
    n, lam = params.n, params.lam
    k = (n - 2) / 2
    r = np.asarray(r, dtype=float)
    s = 1.0 + (lam * r) ** 2
    u = lam ** k * s ** (-k)
    du = -2.0 * k * lam ** (k + 2) * r * s ** (-k - 1)
    d2u = -2.0 * k * lam ** (k + 2) * s ** (-k - 1) + 4.0 * k * (k + 1) * lam ** (k + 4) * r * r * s ** (-k - 2)
    return u, du, d2u


def bubble_curvature(n: int, radius: float = 1.0) -> CurvatureProfile:
    """The constant curvature ``n(n-2)`` that the bubble normalisation assumes."""
    c = float(n * (n - 2))
    return CurvatureProfile("constant", V0=c, a=c, b=c, A=0.0, alpha=1.0, radius=radius)


def bubble_grid(params: BubbleParams, h: float = 1e-3, extent: float = 5.0) -> RadialGrid:
    """Uniform grid whose spacing is ``h`` in the bubble's natural length ``1/lam``,
    covering ``[0, extent/lam]``."""
    return uniform_grid(extent / params.lam, h / params.lam)


def bubble_profile(params: BubbleParams, grid: RadialGrid) -> SolutionProfile:
    """Exact samples of a family member as a :class:`SolutionProfile`."""
    exps = make_exponents(params.n)
    return SolutionProfile(
        grid=grid,
        values=bubble_family_eval(grid.nodes, params),
        exponents=exps,
        has_subcritical_term=False,
        curvature=bubble_curvature(params.n, grid.r_max),
        meta={"source": "bubble", "lam": params.lam, "center_offset": params.center_offset},
    )


def bubble_pde_residual(params: BubbleParams, grid: RadialGrid) -> float:
    """Central-difference residual of ``-Lap u = n(n-2) u^{(n+2)/(n-2)}`` on exact samples.

    Returned relative to the largest right-hand side on the grid, so the
    value is invariant under the scaling symmetry when ``grid`` is a
    :func:`bubble_grid`.  Second order in the spacing.
    """
    if params.center_offset != 0.0:
        raise DomainError("the radial residual is defined for centred bubbles only")
    if len(grid) < MIN_NODES:
        raise DomainError(f"need at least {MIN_NODES} nodes")
    if not grid.starts_at_origin:
        raise DomainError("bubble residual grid must start at r = 0")
    n = params.n
    u = bubble_family_eval(grid.nodes, params)
    idx, mlap = minus_laplacian(u, grid, n)
    rhs = n * (n - 2) * u[idx] ** make_exponents(n).p
    return float(np.max(np.abs(mlap - rhs)) / np.max(np.abs(rhs)))
