import math

import numpy as np
import pytest

from conftest import LOG2, analysis_grid, bubble_ef
from supinf_lab.bubble import BubbleParams, bubble_eval, bubble_profile
from supinf_lab.core import SampledFunction, SolutionProfile, eval_profile, make_exponents, uniform_grid
from supinf_lab.curvature import CurvatureProfile
from supinf_lab.emden_fowler import (EFProfile, apply_L, ef_residual, fitted_shift, from_ef,
                                     shift_profile, to_ef)
from supinf_lab.errors import DomainError
from supinf_lab.radial_solver import ShootingConfig, solve_shoot


def test_bubble_n4_is_sech_over_two(w_bubble):
    expect = 1.0 / (2.0 * np.cosh(w_bubble.t_nodes))
    assert np.max(np.abs(w_bubble.w_values - expect)) < 1e-10
    assert w_bubble.t_max <= -LOG2


def test_value_at_minus_log2():
    t_min, _, _ = analysis_grid()
    w = bubble_ef(t_min=t_min, t_max=-LOG2, h=1e-3)
    assert w.w_values[-1] == pytest.approx(0.4, abs=1e-10)


@pytest.mark.parametrize("n", [3, 5, 6])
def test_bubble_general_n_is_even(n):
    w = bubble_ef(n=n, t_min=-3.0, t_max=3.0, h=1e-3)
    k = (n - 2) / 2
    assert np.max(np.abs(w.w_values - (2 * np.cosh(w.t_nodes)) ** -k)) < 1e-10
    assert np.max(np.abs(w.w_values - w.w_values[::-1])) < 1e-10


def test_bubble_maximum_at_zero(w_symmetric):
    i = int(np.argmax(w_symmetric.w_values))
    assert w_symmetric.t_nodes[i] == pytest.approx(0.0, abs=1e-12)
    assert w_symmetric.w_values[i] == pytest.approx(0.5, abs=1e-12)


def test_constant_profile_maps_to_exponential():
    g = uniform_grid(1.0, 1e-3)
    p = SolutionProfile(g, np.full(len(g), 3.0), make_exponents(4))
    w = to_ef(p, 0.0, -5.0, -LOG2, 501)
    np.testing.assert_allclose(w.w_values, 3.0 * np.exp(w.t_nodes), rtol=1e-14)
    np.testing.assert_allclose(from_ef(w).values, 3.0, rtol=1e-14)


def test_round_trip_on_matched_nodes():
    # nodes of the t grid map to radii where the profile is sampled exactly
    t = np.linspace(-6.0, -LOG2, 400)
    r = np.exp(t)
    p = bubble_profile(BubbleParams(4, 2.0), uniform_grid(0.5, 1e-3))
    u = eval_profile(p, r)
    w = to_ef(p, 0.0, t[0], t[-1], t.size)
    back = from_ef(w)
    np.testing.assert_allclose(back.r, r, rtol=1e-15)
    assert np.max(np.abs(back.values - u)) < 1e-12


def test_from_ef_of_closed_form_is_bubble():
    t = np.linspace(-8.0, -LOG2, 1000)
    w = EFProfile(t, 1 / (2 * np.cosh(t)), 0.0, make_exponents(4))
    back = from_ef(w)
    assert np.max(np.abs(back.values - bubble_eval(back.r, 4))) < 1e-10
    assert not back.grid.starts_at_origin


def test_to_ef_domain_errors():
    p = bubble_profile(BubbleParams(4), uniform_grid(0.3, 1e-3))
    with pytest.raises(DomainError):
        to_ef(p, 0.0, -5.0, -0.5, 100)  # beyond -log 2
    with pytest.raises(DomainError):
        to_ef(p, 0.0, -5.0, -LOG2, 100)  # e^t_max = 0.5 leaves the ball of radius 0.3
    with pytest.raises(DomainError):
        to_ef(p, 0.0, -5.0, -6.0, 100)


def test_ef_profile_invariants():
    t = np.linspace(-3, -1, 20)
    with pytest.raises(DomainError):
        EFProfile(t, -np.ones(20), 0.0, make_exponents(4))
    with pytest.raises(DomainError):
        EFProfile(np.sort(np.random.default_rng(0).uniform(-3, -1, 20)), np.ones(20), 0.0, make_exponents(4))


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_kernel_of_L(n):
    # e^{+-(n-2)t/2} are exact kernel elements of the fitted stencil; samples are
    # taken in extended precision so the h^-2 amplification of their rounding
    # stays below the tolerance
    t = np.linspace(np.longdouble(-8), -np.log(np.longdouble(2)), 7307)
    k = np.longdouble(n - 2) / 2
    Lw = apply_L(SampledFunction(t, np.exp(k * t)), n)
    assert np.max(np.abs(Lw.values)) < 1e-10
    # the growing mode is large at t_min: compare with its own size
    grow = np.exp(-k * t)
    Lg = apply_L(SampledFunction(t, grow), n)
    assert np.max(np.abs(Lg.values)) < 1e-10 * float(grow.max())


def test_kernel_exponential_n4_float64_coarse():
    t = np.linspace(-8.0, -LOG2, 732)
    Lw = apply_L(SampledFunction(t, np.exp(t)), 4)
    assert np.max(np.abs(Lw.values)) < 1e-10


def test_fitted_shift_tends_to_l_const():
    for n in (3, 4, 6):
        assert fitted_shift(n, 1e-3) == pytest.approx(((n - 2) / 2) ** 2, rel=1e-6)


def test_bubble_operator_identity(w_bubble, V8):
    Lw = apply_L(w_bubble)
    wi = w_bubble.w_values[1:-1]
    assert Lw.x.size == w_bubble.t_nodes.size - 2
    assert np.max(np.abs(-Lw.values - 8 * wi ** 3)) < 1e-6
    assert ef_residual(w_bubble, V8, False) < 1e-6


def test_residual_is_second_order(V8):
    r1 = ef_residual(bubble_ef(h=1e-2), V8, False)
    r2 = ef_residual(bubble_ef(h=5e-3), V8, False)
    assert 3.5 <= r1 / r2 <= 4.5


def test_wrong_curvature_is_detected(w_bubble, w_symmetric):
    V9 = CurvatureProfile("constant", V0=9.0, radius=100.0)
    assert ef_residual(w_bubble, V9, False) == pytest.approx(np.max(w_bubble.w_values[1:-1] ** 3), rel=1e-4)
    assert ef_residual(w_symmetric, V9, False) == pytest.approx(0.125, rel=1e-4)


@pytest.mark.parametrize("sub", [False, True])
def test_shooting_solution_in_ef_coordinates(sub):
    V = CurvatureProfile("polynomial", V0=8.0, eps=0.5, k=2, radius=1.0)
    p = solve_shoot(ShootingConfig.for_dimension(4, u0=2.0, r_max=0.6, step=1e-4, curvature=V,
                                                 include_subcritical=sub))
    h = 1e-2
    t_min, t_max, nodes = analysis_grid(-6.0, h)
    w = to_ef(p, 0.0, t_min, t_max, nodes)
    scale = np.max(V.value(np.exp(w.t_nodes)) * w.w_values ** 3 + sub * np.exp(w.t_nodes) * w.w_values ** 2)
    assert ef_residual(w, V, sub) < 100 * h * h * scale
    if sub:
        assert ef_residual(w, V, False) > 100 * h * h * scale  # dropping the term is visible


def test_shift_profile(w_bubble):
    w_end = bubble_ef(t_min=-8.0, t_max=-LOG2, h=1e-3)
    assert float(shift_profile(w_end, 1.0).values[-1]) == pytest.approx(0.4 - 0.25, abs=1e-10)
    shifted = shift_profile(w_bubble, 1.0)
    small = shift_profile(w_bubble, 0.1)
    assert np.all(small.values > 0)
    diff = apply_L(shifted, 4).values - apply_L(w_bubble).values
    assert np.max(np.abs(diff)) < 1e-10


def test_shift_profile_can_be_negative(w_bubble):
    assert np.min(shift_profile(w_bubble, 4.0).values) < 0


def test_shift_profile_rejects():
    w3 = bubble_ef(n=3, h=1e-2)
    with pytest.raises(DomainError):
        shift_profile(w3, 0.1)
    with pytest.raises(DomainError):
        shift_profile(bubble_ef(h=1e-2), 0.0)
