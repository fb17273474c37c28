"""Parametric radial curvature families ``V(r)`` with declared bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError

Family = Literal["constant", "polynomial", "sinusoidal"]


@dataclass(frozen=True)
class CurvatureProfile:
    """``V(r)`` from one of three families, with the declared constants
    ``a <= V <= b`` and ``|V'(r) - V'(s)| <= A |r - s|^alpha`` for
    ``0 <= r, s <= radius`` (gradients are taken along the sampled ray).

    * constant:     ``V0``
    * polynomial:   ``V0 (1 + eps r^k)``, ``k >= 2``
    * sinusoidal:   ``V0 (1 + eps sin(omega r))``

    The declared constants are not enforced here; they are audited by
    :func:`supinf_lab.supinf.theorem_hypothesis_audit`.
    """

    family: Family = "constant"
    V0: float = 8.0
    eps: float = 0.0
    k: float = 2.0
    omega: float = 1.0
    a: float = 8.0
    b: float = 8.0
    A: float = 0.0
    alpha: float = 1.0
    radius: float = 1.0

    def __post_init__(self):
        if self.family not in ("constant", "polynomial", "sinusoidal"):
            raise DomainError(f"unknown curvature family {self.family!r}")
        if self.family == "polynomial" and self.k < 2:
            raise DomainError("polynomial family needs k >= 2 to be C^1 at the origin")
        if not (0 < self.alpha <= 1):
            raise DomainError("Hoelder exponent must lie in (0, 1]")
        if self.radius <= 0:
            raise DomainError("curvature domain radius must be positive")

    @property
    def label(self) -> str:
        if self.family == "constant":
            return f"constant(V0={self.V0!r})"
        if self.family == "polynomial":
            return f"polynomial(V0={self.V0!r},eps={self.eps!r},k={self.k!r})"
        return f"sinusoidal(V0={self.V0!r},eps={self.eps!r},omega={self.omega!r})"

    def value(self, r):
        r = np.asarray(r, dtype=float)
        if self.family == "constant":
            return np.full_like(r, self.V0) if r.ndim else float(self.V0)
        if self.family == "polynomial":
            return self.V0 * (1.0 + self.eps * np.abs(r) ** self.k)
        return self.V0 * (1.0 + self.eps * np.sin(self.omega * r))

    def gradient(self, r):
        """Radial derivative ``V'(r)`` for ``r >= 0``."""
        r = np.asarray(r, dtype=float)
        if self.family == "constant":
            return np.zeros_like(r) if r.ndim else 0.0
        if self.family == "polynomial":
            return self.V0 * self.eps * self.k * np.abs(r) ** (self.k - 1)
        return self.V0 * self.eps * self.omega * np.cos(self.omega * r)

    def scalar_fn(self):
        """Fast pure-Python ``V`` for the integrator inner loop."""
        V0, eps, k, om = self.V0, self.eps, self.k, self.omega
        if self.family == "constant":
            return lambda r: V0
        if self.family == "polynomial":
            return lambda r: V0 * (1.0 + eps * r ** k)
        return lambda r: V0 * (1.0 + eps * math.sin(om * r))

    def analytic_bounds(self, radius: float | None = None) -> tuple[float, float, float]:
        """Exact ``(min V, max V, sup |V''|)`` on ``[0, radius]``.

        ``sup |V''|`` is the smallest admissible ``A`` for ``alpha = 1`` along
        radial lines (mean-value bound on the derivative difference).
        """
        R = self.radius if radius is None else radius
        V0, eps = self.V0, self.eps
        if self.family == "constant":
            return V0, V0, 0.0
        if self.family == "polynomial":
            ends = (V0, V0 * (1 + eps * R ** self.k))
            lip = abs(V0 * eps) * self.k * (self.k - 1) * R ** (self.k - 2)
            return min(ends), max(ends), lip
        om = self.omega
        # extrema of sin on [0, om*R]: endpoints plus interior critical points
        x_hi = om * R
        cands = [0.0, math.sin(x_hi)]
        j = 0
        while (math.pi / 2 + j * math.pi) <= x_hi:
            cands.append(math.sin(math.pi / 2 + j * math.pi))
            j += 1
        vals = [V0 * (1 + eps * c) for c in cands]
        # |V''| = |V0 eps| om^2 |sin(om r)|, max of |sin| on [0, om R]
        max_abs_sin = 1.0 if x_hi >= math.pi / 2 else math.sin(x_hi)
        return min(vals), max(vals), abs(V0 * eps) * om * om * max_abs_sin

    def rescaled(self, scale: float) -> "CurvatureProfile":
        """``z -> V(z/scale)``: the curvature seen by a profile zoomed by ``scale``."""
        kw = dict(self.__dict__)
        kw["radius"] = self.radius * scale
        kw["A"] = self.A * scale ** -(1 + self.alpha)
        if self.family == "polynomial":
            kw["eps"] = self.eps * scale ** -self.k
        elif self.family == "sinusoidal":
            kw["omega"] = self.omega / scale
        return CurvatureProfile(**kw)

    def declared_consistent(self, radius: float | None = None) -> bool:
        lo, hi, lip = self.analytic_bounds(radius)
        return 0 < self.a <= lo and hi <= self.b and (self.alpha < 1 or lip <= self.A)
