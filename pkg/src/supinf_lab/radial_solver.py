"""Fixed-step shooting for positive radial solutions of

    u'' + (n-1)/r u' + V(r) u^{(n+2)/(n-2)} [+ u^{n/(n-2)}] = 0,   u(0) = u0, u'(0) = 0.

The singular coefficient at ``r = 0`` is avoided with a Taylor start over the
first step; classical RK4 takes over from ``r = h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (MIN_NODES, Exponents, RadialGrid, SolutionProfile, make_exponents,
                   minus_laplacian)
from .curvature import CurvatureProfile
from .errors import DomainError, DomainTooLargeError, SolverInstabilityError


@dataclass(frozen=True)
class ShootingConfig:
    u0: float
    r_max: float
    step: float
    exponents: Exponents
    curvature: CurvatureProfile
    include_subcritical: bool = False
    tolerance: float = 1e-8
    # stop as soon as u <= floor (used to abandon sweep members early)
    floor: float | None = None

    def __post_init__(self):
        if not self.u0 > 0:
            raise DomainError("u0 must be positive")
        if not (self.r_max > 0 and self.step > 0):
            raise DomainError("r_max and step must be positive")
        if self.step > self.r_max / 100 * (1 + 1e-12):
            raise DomainError("step must be at most r_max/100")
        if not (0 < self.tolerance <= 1e-3):
            raise DomainError("tolerance must lie in (0, 1e-3]")
        if self.curvature.value(0.0) <= 0:
            raise DomainError("curvature must be positive at the origin")

    @classmethod
    def for_dimension(cls, n: int, **kw) -> "ShootingConfig":
        return cls(exponents=make_exponents(n), **kw)


@dataclass(frozen=True)
class ShootingResult:
    """Why the integration stopped, alongside the returned profile."""

    profile: SolutionProfile
    reason: str
    stop_radius: float
    meta: dict = field(default_factory=dict)


def _integrate(cfg: ShootingConfig):
    n = cfg.exponents.n
    p, q = cfg.exponents.p, cfg.exponents.q
    sub = 1.0 if cfg.include_subcritical else 0.0
    V = cfg.curvature.scalar_fn()
    h = cfg.step
    nm1 = n - 1.0
    stop_at = cfg.tolerance if cfg.floor is None else max(cfg.tolerance, cfg.floor)

    def accel(r, u, v):
        up = u if u > 0.0 else 0.0
        return -nm1 * v / r - V(r) * up ** p - sub * up ** q

    u0 = cfg.u0
    f0 = V(0.0) * u0 ** p + sub * u0 ** q
    f1 = float(cfg.curvature.gradient(0.0)) * u0 ** p
    # Taylor start: u = u0 - f0 r^2/(2n) - f1 r^3/(3(n+1)) + O(r^4)
    u = u0 - f0 * h * h / (2 * n) - f1 * h ** 3 / (3 * (n + 1))
    v = -f0 * h / n - f1 * h * h / (n + 1)

    count = int(math.floor(cfg.r_max / h + 1e-9))
    us = [u0]
    reason = "r_max"
    if not (u > stop_at):
        return us, "positivity", h
    us.append(u)
    for i in range(1, count):
        r = i * h
        k1u, k1v = v, accel(r, u, v)
        rm = r + 0.5 * h
        k2u = v + 0.5 * h * k1v
        k2v = accel(rm, u + 0.5 * h * k1u, k2u)
        k3u = v + 0.5 * h * k2v
        k3v = accel(rm, u + 0.5 * h * k2u, k3u)
        k4u = v + h * k3v
        k4v = accel(r + h, u + h * k3u, k4u)
        u_new = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        v_new = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not (math.isfinite(u_new) and math.isfinite(v_new)):
            raise SolverInstabilityError(f"non-finite state at r = {(i + 1) * h:.6g}")
        if u_new <= stop_at:
            reason = "floor" if cfg.floor is not None and u_new <= cfg.floor and u_new > cfg.tolerance \
                else "positivity"
            return us, reason, (i + 1) * h
        u, v = u_new, v_new
        us.append(u)
    return us, reason, count * h


def shoot(cfg: ShootingConfig) -> ShootingResult:
    """Integrate and also report why integration stopped."""
    us, reason, stop_r = _integrate(cfg)
    if len(us) < MIN_NODES:
        raise DomainTooLargeError(
            f"positivity lost at r = {stop_r:.6g} after {len(us)} nodes (need {MIN_NODES})")
    nodes = np.arange(len(us)) * cfg.step
    prof = SolutionProfile(
        grid=RadialGrid(nodes, "uniform"),
        values=np.array(us),
        exponents=cfg.exponents,
        has_subcritical_term=cfg.include_subcritical,
        curvature=cfg.curvature,
        meta={"source": "shooting", "u0": cfg.u0, "step": cfg.step, "stop": reason},
    )
    return ShootingResult(prof, reason, stop_r)


def solve_shoot(cfg: ShootingConfig) -> SolutionProfile:
    """Positive radial profile from ``u(0) = u0`` up to ``r_max`` or the first
    node where ``u`` would drop to ``tolerance``."""
    return shoot(cfg).profile


def pde_residual(p: SolutionProfile, relative: bool = False) -> float:
    """Max central-difference residual of the profile's own equation.

    The last node is excluded; ``r = 0`` uses the regularised ``n u''(0)``.
    With ``relative=True`` the residual is divided by the largest right-hand
    side on the same nodes.
    """
    if len(p.grid) < MIN_NODES:
        raise DomainError(f"need at least {MIN_NODES} nodes")
    idx, mlap = minus_laplacian(p.values, p.grid, p.n)
    rhs = p.rhs(p.r[idx], p.values[idx])
    res = float(np.max(np.abs(mlap - rhs)))
    return res / float(np.max(np.abs(rhs))) if relative else res


def rhs_scale(p: SolutionProfile) -> float:
    """Largest right-hand side of the profile's equation over its nodes."""
    return float(np.max(np.abs(p.rhs(p.r, p.values))))


def curvature_gradient_at(V: CurvatureProfile, r: float) -> float:
    return float(V.gradient(r))


@dataclass(frozen=True)
class HolderReport:
    holds: bool
    first_violation: dict | None
    max_ratio: float
    samples: int


def holder_bound_check(V: CurvatureProfile, y: float, A: float, alpha: float,
                       t_samples, rtol: float = 1e-12) -> HolderReport:
    """Check ``|V'(y + theta e^t) - V'(y)| <= A e^{alpha t}`` for ``theta = +-1``.

    Points are taken on the sampled ray; ``theta = -1`` samples that would
    cross the origin are skipped.  ``max_ratio`` is the largest observed
    ``lhs / (A e^{alpha t})`` (infinite when ``A = 0`` and ``lhs > 0``).
    """
    ts = np.atleast_1d(np.asarray(t_samples, dtype=float))
    if np.any(ts > -math.log(2) + 1e-15):
        raise DomainError("t samples must satisfy t <= -log 2")
    if y < 0 or y + np.exp(ts).max() > V.radius * (1 + 1e-12):
        raise DomainError("y + e^t leaves the curvature domain")
    g0 = float(V.gradient(y))
    first = None
    worst = 0.0
    count = 0
    for t in ts:
        s = math.exp(t)
        bound = A * math.exp(alpha * t)
        for theta in (1.0, -1.0):
            x = y + theta * s
            if x < 0:
                continue
            count += 1
            lhs = abs(float(V.gradient(x)) - g0)
            ratio = lhs / bound if bound > 0 else (math.inf if lhs > rtol else 0.0)
            worst = max(worst, ratio)
            if lhs > bound * (1 + rtol) + 1e-15 and first is None:
                first = {"t": float(t), "theta": theta, "lhs": lhs, "rhs": bound}
    return HolderReport(first is None, first, worst, count)
