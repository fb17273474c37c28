import json
import math

import numpy as np
import pytest

from conftest import LOG2, analysis_grid, bubble_ef
from supinf_lab.bubble import BubbleParams, bubble_profile
from supinf_lab.core import geometric_grid, make_exponents, uniform_grid
from supinf_lab.curvature import CurvatureProfile
from supinf_lab.emden_fowler import EFProfile, to_ef
from supinf_lab.errors import DomainError, SearchError
from supinf_lab.moving_plane import (apriori_bound, cbar_for, compare, find_xi, gap, hopf_conclusion_check,
                                     lambda_bar_for, lemma2_check, lemma_n4_check, measured_epsilon,
                                     minus_L_gap, reflect, z_decomposition)
from supinf_lab.radial_solver import ShootingConfig, solve_shoot


def exp_profile(c=0.3, t_min=-6.0, h=1e-3, sign=1.0):
    t_min, t_max, nodes = analysis_grid(t_min, h)
    t = np.linspace(t_min, t_max, nodes)
    return EFProfile(t, c * np.exp(sign * t), 0.0, make_exponents(4))


def test_reflect_exponential_formula():
    w = exp_profile()
    lam = -2.0
    r = reflect(w, lam)
    np.testing.assert_allclose(r.values, 0.3 * np.exp(2 * lam - r.x), rtol=1e-12)


def test_reflect_fixed_point_and_even_profile(w_symmetric):
    r = reflect(w_symmetric, 0.0)
    assert np.array_equal(r.x, w_symmetric.t_nodes)
    assert np.max(np.abs(r.values - w_symmetric.w_values)) < 1e-12
    lam = float(w_symmetric.t_nodes[1234])
    r = reflect(w_symmetric, lam, lam + 0.5)
    assert r.values[list(r.x).index(lam)] == w_symmetric.w_values[1234]


@pytest.mark.parametrize("lam", [-0.5, -0.4321, 0.25, 0.1234567])
def test_reflect_is_an_involution(w_symmetric, lam):
    t_hi = lam + 1.0
    once = reflect(w_symmetric, lam, t_hi)
    twice = reflect(EFProfile(once.x, once.values, 0.0, make_exponents(4)), lam, t_hi)
    orig = np.interp(twice.x, w_symmetric.t_nodes, w_symmetric.w_values)
    assert np.max(np.abs(twice.values - orig)) < 1e-12


def test_reflect_leaving_grid_names_required_tmin(w_bubble):
    with pytest.raises(DomainError, match="t_min"):
        reflect(w_bubble, -4.5)


def test_compare_bubble_strictly_negative(w_bubble):
    g, where = compare(w_bubble, -1.0, w_bubble.t_max)
    assert g < 0 and -1.0 < where <= w_bubble.t_max
    tt = gap(w_bubble, -1.0, w_bubble.t_max).x
    closed = 1 / (2 * np.cosh(2 * -1.0 - tt)) - 1 / (2 * np.cosh(tt))
    np.testing.assert_allclose(gap(w_bubble, -1.0, w_bubble.t_max).values, closed, atol=1e-12)


def test_compare_even_profile_at_axis(w_symmetric):
    g, _ = compare(w_symmetric, 0.0, 1.0)
    assert abs(g) < 1e-12


def test_compare_exponential():
    w = exp_profile()
    g, where = compare(w, -2.0, w.t_max)
    assert g == pytest.approx(0.3 * (np.exp(-4.0 - where) - np.exp(where)))
    assert g < 0


def test_compare_rejects_empty_window(w_bubble):
    with pytest.raises(DomainError):
        compare(w_bubble, -0.5, w_bubble.t_max)


@pytest.mark.parametrize("h", [1e-2, 1e-3, 1e-4])
def test_find_xi_symmetric_bubble(h):
    w = bubble_ef(t_min=-3.0, t_max=3.0, h=h, r_step=min(h, 1e-3))
    rep = find_xi(w, 2.0, 2.5)
    assert abs(rep.xi) <= h
    assert rep.xi <= rep.lambda_bar and rep.max_gap < 0


def test_find_xi_exponential_reaches_lambda_bar():
    w = exp_profile()
    rep = find_xi(w, -2.0, w.t_max)
    assert rep.xi == pytest.approx(-2.0, abs=w.h / 2)
    assert rep.contact_plane is None


@pytest.mark.parametrize("lam,d", [(4.0, 0.1), (8.0, 0.1), (4.0, 0.2)])
def test_find_xi_off_center_bubble_hits_symmetry_plane(lam, d):
    # along the ray the displaced bubble is symmetric in t about log(d^2 + lam^-2)/2
    h = 1e-3
    t_min, t_max, nodes = analysis_grid(-8.0, h)
    prof = bubble_profile(BubbleParams(4, lam, d), uniform_grid(0.6, 1e-4))
    w = to_ef(prof, 0.0, t_min, t_max, nodes)
    plane = 0.5 * math.log(d * d + lam ** -2)
    rep = find_xi(w, 2.0, t_max)
    assert abs(rep.xi - plane) <= h
    assert compare(w, rep.xi, t_max)[0] < -1e-12
    assert rep.contact_plane == pytest.approx(rep.xi + h / 2)
    assert compare(w, rep.contact_plane, t_max)[0] >= -1e-12


def test_find_xi_uses_blowup_window_when_t1_missing(w_bubble):
    w = EFProfile(w_bubble.t_nodes, w_bubble.w_values, 0.0, w_bubble.exponents, meta={"t1": -1.0})
    assert find_xi(w, -1.5).t1 == -1.0
    with pytest.raises(DomainError):
        find_xi(w_bubble, -1.5)


def test_find_xi_reports_search_failure():
    w = exp_profile(sign=-1.0)  # decreasing: every reflection lies above w
    with pytest.raises(SearchError) as err:
        find_xi(w, -2.0, w.t_max)
    lo, hi = err.value.scanned
    assert lo < hi


def test_report_json_round_trip(w_bubble, V8):
    rep = find_xi(w_bubble, -1.0, w_bubble.t_max, V=V8)
    data = json.loads(rep.to_json())
    assert data["xi"] == rep.xi and data["lemma_holds"] is True


def test_lambda_bar():
    assert lambda_bar_for(1.0, 4) == 2.0
    assert lambda_bar_for(100.0, 4) == pytest.approx(2 - math.log(100))
    assert lambda_bar_for(8.0, 5) == pytest.approx(2 - 2 / 3 * math.log(8))


def test_z_signs_constant_curvature(w_bubble, V8):
    z1, z2 = z_decomposition(w_bubble, -1.0, V8, False, w_bubble.t_max)
    assert np.all(z1.values <= 1e-14) and np.all(z2.values == 0)
    z1, z2 = z_decomposition(w_bubble, -1.0, V8, True, w_bubble.t_max)
    assert np.all(z2.values <= 1e-14)


def test_z_sum_matches_stencil(w_symmetric, V8):
    z1, z2 = z_decomposition(w_symmetric, -0.5, V8, False, 1.0)
    mL = minus_L_gap(w_symmetric, -0.5, 1.0)
    total = dict(zip(np.round(z1.x, 9), z1.values + z2.values))
    diff = [abs(total[x] - v) for x, v in zip(np.round(mL.x, 9), mL.values)]
    assert max(diff) < 1e-5
    assert max(z1.values + z2.values) < 0


def test_z_sum_matches_stencil_with_perturbation():
    V = CurvatureProfile("constant", V0=8.0, a=8.0, b=8.0, radius=1.0)
    p = solve_shoot(ShootingConfig.for_dimension(4, u0=3.0, r_max=0.6, step=1e-4, curvature=V,
                                                 include_subcritical=True))
    t_min, t_max, nodes = analysis_grid(-6.0, 1e-3)
    w = to_ef(p, 0.0, t_min, t_max, nodes)
    lam = -2.0
    assert compare(w, lam, t_max)[0] < 0
    z1, z2 = z_decomposition(w, lam, V, True, t_max)
    mL = minus_L_gap(w, lam, t_max)
    n = mL.x.size
    assert np.max(np.abs(z1.values[:n] + z2.values[:n] - mL.values)) < 1e-5
    assert np.all(z2.values <= 0)


def test_lemma2_constant_curvature(w_bubble, V8):
    rep = lemma2_check(w_bubble, -1.0, V8, False, w_bubble.t_max)
    assert not rep.vacuous and rep.conclusion_holds and rep.max_minus_L < 0
    assert rep.epsilon == 0.0 and rep.taylor_chain_holds


def test_lemma2_exponential_kernel(V8):
    w = exp_profile(c=0.3)
    rep = lemma2_check(w, -2.0, V8, True, w.t_max)
    assert not rep.vacuous and abs(rep.max_minus_L) < 1e-9 and rep.conclusion_holds


def test_lemma2_vacuous_outside_comparison(w_symmetric, V8):
    rep = lemma2_check(w_symmetric, 0.3, V8, False, 1.0)
    assert rep.vacuous and rep.conclusion_holds


def test_lemma2_sufficient_condition_can_fail(w_bubble):
    V = CurvatureProfile("sinusoidal", V0=8.0, eps=0.5, omega=10.0, a=4.0, b=12.0,
                         A=8.0 * 0.5 * 100.0, alpha=1.0, radius=1.0)
    rep = lemma2_check(w_bubble, -1.0, V, True, w_bubble.t_max)
    assert rep.taylor_chain_holds
    assert rep.sufficient_max > 1 and not rep.sufficient_holds


def test_measured_epsilon_polynomial(w_bubble):
    # |V(e^{2l-t}) - V(e^t)| / (e^t - e^{2l-t}) = V0 eps (e^t + e^{2l-t}) for k = 2
    V = CurvatureProfile("polynomial", V0=8.0, eps=0.5, k=2, radius=1.0)
    lam = -1.5
    t1 = w_bubble.t_max
    assert measured_epsilon(w_bubble, V, lam, t1) == pytest.approx(4.0 * (math.exp(t1) + math.exp(2 * lam - t1)), rel=1e-9)


def test_lemma_n4_chain(w_bubble, V8):
    rep = lemma_n4_check(w_bubble, -1.0, V8, 0.1, w_bubble.t_max)
    assert rep.all_hold
    assert rep.kernel_discrepancy < 1e-10
    assert rep.apriori_value <= 0.5 and rep.apriori_bound == pytest.approx(14.7781121978613, rel=1e-12)


def test_lemma_n4_equality_case(w_symmetric, V8):
    rep = lemma_n4_check(w_symmetric, 0.0, V8, 0.1, 1.0)
    assert rep.cubic_holds and rep.vacuous


def test_lemma_n4_rejects_other_dimensions(V8):
    w3 = bubble_ef(n=3, h=1e-2)
    with pytest.raises(DomainError):
        lemma_n4_check(w3, -1.0, V8, 0.1, w3.t_max)


def test_apriori_bound_value():
    assert apriori_bound(8.0) == pytest.approx(2 * math.e ** 2)


def test_hopf_symmetric_equality(w_symmetric):
    rep = hopf_conclusion_check(w_symmetric, 0.0, 1.5)
    assert rep.holds and rep.w_t1 == pytest.approx(rep.w_mirror, abs=1e-12)


@pytest.mark.parametrize("lam", [1.0, 10.0, 100.0])
def test_hopf_product_bubble_family(lam):
    prof = bubble_profile(BubbleParams(4, lam), geometric_grid(1.0, 1e-3 / lam, 1.02, 1e-3))
    t_min, t_max, nodes = analysis_grid(-8.0, 1e-3)
    w = to_ef(prof, 0.0, t_min, t_max, nodes)
    rep = hopf_conclusion_check(w, t_max - 1.0, t_max, profile=prof, l=1.0)
    assert rep.product == pytest.approx(lam * lam / (1 + lam * lam), rel=1e-12)
    assert rep.product <= 1 + 1e-9


def test_hopf_fails_for_monotone_exponential():
    w = exp_profile()
    rep = hopf_conclusion_check(w, -2.0, w.t_max)
    assert not rep.holds and rep.w_t1 > rep.w_mirror


def test_reflected_profile_below_cbar(w_bubble):
    assert cbar_for(4) == pytest.approx(2 * math.e ** 2) == apriori_bound(8.0)
    assert cbar_for(3) == pytest.approx(math.sqrt(2) * math.e)
    rep = find_xi(w_bubble, -1.0, w_bubble.t_max)
    g = gap(w_bubble, rep.xi, w_bubble.t_max)
    on = (w_bubble.t_nodes > rep.xi + 1e-9) & (w_bubble.t_nodes <= w_bubble.t_max + 1e-12)
    assert rep.reflected_max == pytest.approx(np.max(g.values + w_bubble.w_values[on]), abs=1e-15)
    assert rep.cbar_holds and rep.reflected_max <= 0.5
