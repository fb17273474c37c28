"""Blow-up point selection and rescaling towards the standard bubble.

For a profile ``u`` on the ball of radius ``R`` the concentration function
``s(r) = (R - r)^{(n-2)/2} u(r)`` picks the point ``y`` where ``u`` is large
relative to its distance from the boundary.  Zooming at ``y`` by
``u(y)^{2/(n-2)}`` and normalising gives ``v``, which should look like the
bubble when ``u(y)`` is large.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .bubble import bubble_eval
from .core import (MIN_NODES, RadialGrid, SampledFunction, SolutionProfile, ball, eval_profile,
                   extremum_on)
from .emden_fowler import T_MAX, EFProfile, to_ef
from .errors import DomainError

R_TILDE = 10.0


def concentration_function(p: SolutionProfile, R: float) -> SampledFunction:
    """``s(r) = (R - r)^{(n-2)/2} u(r)`` on the nodes below ``R``, closed by ``s(R) = 0``."""
    if not 0 < R <= p.ball_radius * (1 + 1e-12):
        raise DomainError(f"R = {R} must lie in (0, {p.ball_radius}]")
    r = p.r
    inside = r < R
    rr = np.append(r[inside], R)
    s = np.append((R - r[inside]) ** p.exponents.k * p.values[inside], 0.0)
    return SampledFunction(rr, s, "s")


def select_blowup_point(s: SampledFunction, p: SolutionProfile, R: float) -> tuple[float, float, float]:
    """``(y, l, u(y))`` with ``y`` the argmax of ``s`` (smallest radius on ties)
    and ``l = R - y``."""
    i = int(np.argmax(s.values))  # first occurrence: smallest radius
    y = float(s.x[i])
    return y, float(R - y), float(eval_profile(p, y))


def rescale(p: SolutionProfile, y: float, z_step: float | None = None) -> SolutionProfile:
    """``v(z) = u(y + z u(y)^{-2/(n-2)}) / u(y)`` along the ray ``z >= 0``.

    On a uniform grid with ``y`` a node and ``z_step`` unset, the nodes
    ``r >= y`` are mapped one-to-one and nothing is interpolated.  Otherwise
    ``v`` is sampled on a uniform ``z`` grid of spacing ``z_step`` (default
    ``1e-3``) through the cubic interpolant of ``u``.

    The result solves the zoomed equation: curvature ``V(y + z/scale)`` and a
    subcritical coefficient multiplied by ``u(y)^{-2/(n-2)}``.
    """
    u_y = float(eval_profile(p, y))
    k = p.exponents.k
    scale = u_y ** (1.0 / k)
    r = p.r
    hit = np.flatnonzero(r == y)
    if z_step is None and p.grid.step is not None and hit.size:
        sel = r[hit[0]:]
        z = (sel - y) * scale
        v = p.values[hit[0]:] / u_y
        policy = "uniform"
    else:
        dz = 1e-3 if z_step is None else z_step
        z_max = (p.ball_radius - y) * scale
        count = int(math.floor(z_max / dz * (1 + 1e-12)))
        z = np.arange(max(count, 0) + 1) * dz
        if z.size < MIN_NODES:
            raise DomainError(f"rescaled domain has {z.size} nodes (need {MIN_NODES})")
        v = eval_profile(p, np.minimum(y + z / scale, p.ball_radius)) / u_y
        policy = "uniform"
    if z.size < MIN_NODES:
        raise DomainError(f"rescaled domain has {z.size} nodes (need {MIN_NODES})")
    v = np.array(v, dtype=float)
    v[0] = 1.0
    curvature = None
    if p.curvature is not None and y == 0.0:
        curvature = p.curvature.rescaled(scale)
    return SolutionProfile(
        grid=RadialGrid(z, policy),
        values=v,
        exponents=p.exponents,
        has_subcritical_term=p.has_subcritical_term,
        curvature=curvature,
        meta={"source": "rescale", "center": y, "scale": scale, "u_y": u_y},
        subcritical_coeff=p.subcritical_coeff / scale,
    )


def bubble_distance(v: SolutionProfile, R_tilde: float = R_TILDE) -> float:
    """Sup-distance of ``v`` to the bubble on ``[0, R_tilde]``, over nodes and
    interpolated midpoints."""
    if R_tilde > v.grid.r_max * (1 + 1e-12):
        raise DomainError(f"rescaled profile reaches z = {v.grid.r_max} < R_tilde = {R_tilde}")
    z = v.r[v.r <= R_tilde * (1 + 1e-12)]
    mids = 0.5 * (z[1:] + z[:-1])
    pts = np.concatenate((z, mids))
    return float(np.max(np.abs(eval_profile(v, pts) - bubble_eval(pts, v.n))))


@dataclass(frozen=True)
class BlowupDiagnostics:
    u0: float
    y: float
    l: float
    L: float
    beta: float
    delta: float
    bubble_distance: float
    R_tilde: float
    u_y: float
    v_max: float
    product: float | None = None

    def row(self) -> dict:
        return asdict(self)


CSV_FIELDS = ("u0", "y", "l", "L", "beta", "bubble_distance")


@dataclass(frozen=True)
class BlowupSeries:
    rows: list[BlowupDiagnostics] = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    @property
    def distances(self) -> list[float]:
        return [d.bubble_distance for d in self.rows]

    @property
    def decreasing(self) -> bool:
        """Strictly decreasing ``bubble_distance`` along the family."""
        d = self.distances
        return all(b < a for a, b in zip(d, d[1:]))


def delta_beta(c: float, n: int) -> tuple[float, float]:
    """``delta = c^{-1/(2(n-2))}`` and ``beta = (1/(1-delta))^{(n-2)/2}``
    (infinite when ``delta >= 1``)."""
    delta = c ** (-1.0 / (2 * (n - 2)))
    beta = (1.0 / (1.0 - delta)) ** ((n - 2) / 2) if delta < 1 else math.inf
    return delta, beta


def diagnose(p: SolutionProfile, R: float, R_tilde: float = R_TILDE, c: float | None = None,
             omega_radius: float | None = 1.0) -> BlowupDiagnostics:
    """Run selection and rescaling for one profile.

    ``c`` is the stand-in for the blow-up constant in ``delta``; it defaults
    to the centre value ``u(0)``.  ``product`` is ``l^{(n-2)/2} u(y) inf u``
    over ``B(0, omega_radius)`` when that ball is sampled.
    """
    n = p.n
    u0 = float(p.values[0])
    s = concentration_function(p, R)
    y, l, u_y = select_blowup_point(s, p, R)
    v = rescale(p, y)
    delta, beta = delta_beta(u0 if c is None else c, n)
    L = l * delta * u_y ** (2.0 / (n - 2))
    product = None
    if omega_radius is not None and omega_radius <= p.ball_radius:
        product = l ** p.exponents.k * u_y * extremum_on(p, ball(omega_radius), "inf")
    return BlowupDiagnostics(u0=u0, y=y, l=l, L=L, beta=beta, delta=delta,
                             bubble_distance=bubble_distance(v, R_tilde), R_tilde=R_tilde,
                             u_y=u_y, v_max=float(v.values.max()), product=product)


def _diagnose_args(args):
    return diagnose(*args)


def blowup_report(family: Sequence[SolutionProfile], R: float, R_tilde: float = R_TILDE,
                  c: Sequence[float] | None = None, omega_radius: float | None = 1.0,
                  workers: int | None = None) -> BlowupSeries:
    """Diagnostics for each member in input order (parallel when ``workers > 1``)."""
    if not family:
        raise DomainError("the family is empty")
    cs = [None] * len(family) if c is None else list(c)
    args = [(p, R, R_tilde, ci, omega_radius) for p, ci in zip(family, cs)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_diagnose_args, args))
    else:
        rows = [_diagnose_args(a) for a in args]
    return BlowupSeries(rows)


def ef_about_blowup_point(p: SolutionProfile, diag: BlowupDiagnostics, t_min: float = -8.0,
                          h: float = 1e-3) -> EFProfile:
    """Cylindrical profile about ``y`` with ``t1 = log sqrt(l)`` (capped at the
    last node) recorded in ``meta["t1"]`` for :func:`~supinf_lab.moving_plane.find_xi`."""
    t_top = min(T_MAX, math.log(p.ball_radius - diag.y))
    count = int(math.floor((t_top - t_min) / h + 1e-9))
    w = to_ef(p, diag.y, t_min, t_min + count * h, count + 1)
    w.meta["t1"] = min(0.5 * math.log(diag.l), w.t_max)
    w.meta["l"] = diag.l
    return w
