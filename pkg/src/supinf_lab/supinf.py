"""Harnesses for the sup x inf inequality (Theorems 1-2) and the bound on
``sup_K u`` under ``min u >= m`` (Theorems 3-4), over one-parameter families.

Families are either the bubble scale family (closed form, the calibration
row) or shooting solutions indexed by the centre value ``u0``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .bubble import BubbleParams, bubble_profile
from .core import RegionSpec, SolutionProfile, ball, extremum_on, geometric_grid, make_exponents
from .curvature import CurvatureProfile
from .errors import DomainError, SolverError
from .radial_solver import ShootingConfig, holder_bound_check, shoot

FamilyKind = Literal["bubble", "shooting"]


def _default_K():
    return ball(0.5)


def _default_Omega():
    return ball(1.0)


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: a theorem, a family of profiles and the regions ``K``, ``Omega``.

    ``step`` is the grid spacing in the natural length of each member
    (``1/lam`` for bubbles, ``u0^{-2/(n-2)}`` for shooting members).
    """

    theorem: int
    n: int
    family: FamilyKind
    params: tuple[float, ...]
    curvature: CurvatureProfile = field(default_factory=lambda: CurvatureProfile(radius=1.0))
    K: RegionSpec = field(default_factory=_default_K)
    Omega: RegionSpec = field(default_factory=_default_Omega)
    m: float | None = None
    include_subcritical: bool = False
    step: float = 1e-2
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        make_exponents(self.n)
        if self.theorem not in (1, 2, 3, 4):
            raise DomainError(f"theorem must be 1, 2, 3 or 4, got {self.theorem}")
        if self.family not in ("bubble", "shooting"):
            raise DomainError(f"unknown family {self.family!r}")
        if not self.params or any(not x > 0 for x in self.params):
            raise DomainError("the family needs at least one positive parameter")
        if self.theorem in (3, 4):
            if self.n != 4:
                raise DomainError("theorems 3 and 4 are stated in dimension 4")
            if self.m is None or not self.m > 0:
                raise DomainError("theorems 3 and 4 need a positive m")
            if self.include_subcritical:
                raise DomainError("theorems 3 and 4 concern the equation without the subcritical term")
        if self.family == "bubble" and self.include_subcritical:
            raise DomainError("the bubble family solves the pure critical equation only")
        if self.theorem in (1, 2) and self.family == "shooting" and not self.include_subcritical:
            raise DomainError("theorems 1 and 2 need the subcritical term (the bubble family is the calibration)")
        if not 0 < self.step <= 0.1:
            raise DomainError("step must lie in (0, 0.1]")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        k_lo, k_hi = self.K.radial_range()
        o_lo, o_hi = self.Omega.radial_range()
        if not (o_lo <= k_lo and k_hi < o_hi) or (o_lo > 0 and k_lo == o_lo):
            raise DomainError("K must be compactly contained in Omega")
        if self.curvature.radius < o_hi:
            raise DomainError("the curvature domain must cover Omega")

    @property
    def radius(self) -> float:
        """Outer radius of the ball the members are sampled on."""
        return self.Omega.radial_range()[1]

    def echo(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SweepRow:
    parameter: float
    status: Literal["ok", "excluded", "skipped"]
    sup_K: float | None = None
    inf_Omega: float | None = None
    value: float | None = None
    closed_form: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class SweepReport:
    rows: list[SweepRow]
    empirical_c: float
    monotone_flag: bool
    closed_form_error: float | None
    config: dict

    @property
    def values(self) -> list[float]:
        return [r.value for r in self.rows if r.status == "ok"]


def _bubble_member(cfg: SweepConfig, lam: float) -> SolutionProfile:
    # fine spacing in the core of the bubble, capped at `step` further out
    grid = geometric_grid(cfg.radius, first_step=cfg.step / lam, growth=1.02,
                          max_step=cfg.step)
    return bubble_profile(BubbleParams(cfg.n, lam), grid)


def bubble_closed_form(n: int, lam: float, K: RegionSpec, Omega: RegionSpec) -> float | None:
    """``sup_K u_lam * inf_Omega u_lam`` in closed form, or ``None`` when the
    regions are not centred balls (``K`` must contain the origin)."""
    if K.kind != "ball" or K.center != 0.0 or Omega.kind != "ball" or Omega.center != 0.0:
        return None
    k = (n - 2) / 2
    R = Omega.radial_range()[1]
    return (lam * lam / (1.0 + lam * lam * R * R)) ** k


def _row(cfg: SweepConfig, x: float) -> SweepRow:
    try:
        if cfg.family == "bubble":
            p = _bubble_member(cfg, x)
        else:
            k = make_exponents(cfg.n).k
            # a whole number of steps, so the last node lands on the boundary of Omega
            count = max(100, math.ceil(cfg.radius / (cfg.step * x ** (-1.0 / k))))
            sc = ShootingConfig.for_dimension(
                cfg.n, u0=x, r_max=cfg.radius, step=cfg.radius / count,
                curvature=cfg.curvature, include_subcritical=cfg.include_subcritical,
                floor=cfg.m if cfg.theorem in (3, 4) else None)
            res = shoot(sc)
            p = res.profile
            if res.reason == "floor":
                return SweepRow(x, "excluded", error=f"u < m at r = {res.stop_radius:.6g}")
            if res.reason != "r_max":
                return SweepRow(x, "skipped", error=f"positivity lost at r = {res.stop_radius:.6g}")
        sup_k = extremum_on(p, cfg.K, "sup")
        inf_o = extremum_on(p, cfg.Omega, "inf")
    except (SolverError, DomainError) as exc:
        return SweepRow(x, "skipped", error=f"{type(exc).__name__}: {exc}")
    if cfg.theorem in (3, 4):
        if inf_o < cfg.m:
            return SweepRow(x, "excluded", sup_k, inf_o, error="min over Omega below m")
        return SweepRow(x, "ok", sup_k, inf_o, sup_k)
    closed = bubble_closed_form(cfg.n, x, cfg.K, cfg.Omega) if cfg.family == "bubble" else None
    return SweepRow(x, "ok", sup_k, inf_o, sup_k * inf_o, closed)


def _row_args(args):
    return _row(*args)


def run_sweep(cfg: SweepConfig) -> SweepReport:
    """Evaluate every member; rows keep the parameter order of the config."""
    args = [(cfg, x) for x in cfg.params]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            rows = list(ex.map(_row_args, args))
    else:
        rows = [_row_args(a) for a in args]
    vals = [r.value for r in rows if r.status == "ok"]
    emp = max(vals) if vals else math.nan
    monotone = all(b >= a for a, b in zip(vals, vals[1:]))
    errs = [abs(r.value - r.closed_form) for r in rows if r.closed_form is not None]
    return SweepReport(rows, emp, monotone, max(errs) if errs else None, cfg.echo())


# -- hypothesis audit ---------------------------------------------------------

@dataclass(frozen=True)
class AuditReport:
    theorem: int
    passed: bool
    violations: list[dict]
    checked: list[str]


def _critical_radii(V: CurvatureProfile, R: float) -> np.ndarray:
    if V.family == "sinusoidal" and V.omega > 0:
        j = np.arange(0, int(V.omega * R / math.pi) + 2)
        r = (math.pi / 2 + j * math.pi) / V.omega
        return r[r <= R]
    return np.empty(0)


def theorem_hypothesis_audit(cfg: SweepConfig, samples: int = 2001, rtol: float = 1e-12) -> AuditReport:
    """Check the declared ``(a, b, A, alpha)`` of the curvature on ``[0, V.radius]``.

    Bounds are sampled on a uniform grid together with the interior critical
    points of the family.  The Hoelder condition on ``V'`` is sampled along
    the ray with :func:`~supinf_lab.radial_solver.holder_bound_check`.
    Theorems 2 and 4 only ask for ``V >= a > 0`` and ``V`` of class ``C^1``.
    """
    V = cfg.curvature
    R = V.radius
    r = np.unique(np.concatenate((np.linspace(0.0, R, samples), _critical_radii(V, R))))
    vals = V.value(r)
    violations = []
    checked = ["a_positive", "lower_bound", "C1"]
    if not V.a > 0:
        violations.append({"kind": "a_positive", "radius": None, "value": V.a, "declared": V.a})
    i = int(np.argmin(vals))
    if vals[i] < V.a * (1 - rtol):
        violations.append({"kind": "lower_bound", "radius": float(r[i]), "value": float(vals[i]),
                           "declared": V.a})
    # every family is C^1 on [0, R]; polynomial needs k >= 2, enforced at construction
    if cfg.theorem in (1, 3):
        checked += ["upper_bound", "holder"]
        j = int(np.argmax(vals))
        if vals[j] > V.b * (1 + rtol):
            violations.append({"kind": "upper_bound", "radius": float(r[j]), "value": float(vals[j]),
                               "declared": V.b})
        ts = np.linspace(math.log(R) - 12.0, min(-math.log(2), math.log(R / 2)), 200)
        for y in np.linspace(0.0, R - math.exp(ts[-1]), 41):
            rep = holder_bound_check(V, float(y), V.A, V.alpha, ts, rtol=1e-9)
            if not rep.holds:
                v = dict(rep.first_violation)
                violations.append({"kind": "holder", "radius": float(y), "value": v["lhs"],
                                   "declared": v["rhs"], "t": v["t"]})
                break
    return AuditReport(cfg.theorem, not violations, violations, checked)


def default_family(theorem: int, family: FamilyKind) -> tuple[float, ...]:
    """Documented default parameter lists: ``2^0 .. 2^10`` for bubbles,
    ``2^{j/2}, j = 0..19`` for shooting members."""
    if family == "bubble":
        return tuple(float(2 ** j) for j in range(11))
    return tuple(2.0 ** (j / 2) for j in range(20))
