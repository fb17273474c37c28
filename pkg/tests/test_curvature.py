import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supinf_lab.curvature import CurvatureProfile
from supinf_lab.errors import DomainError

FAMILIES = [
    CurvatureProfile("constant", V0=8.0, radius=1.0),
    CurvatureProfile("polynomial", V0=8.0, eps=0.5, k=2, radius=1.0),
    CurvatureProfile("polynomial", V0=8.0, eps=-0.3, k=3, radius=1.5),
    CurvatureProfile("sinusoidal", V0=8.0, eps=0.1, omega=2.0, radius=1.0),
    CurvatureProfile("sinusoidal", V0=6.0, eps=0.2, omega=7.0, radius=2.0),
]


@pytest.mark.parametrize("V", FAMILIES, ids=lambda V: V.label)
def test_analytic_bounds_match_dense_sampling(V):
    r = np.linspace(0.0, V.radius, 400001)
    vals = V.value(r)
    lo, hi, lip = V.analytic_bounds()
    assert lo == pytest.approx(vals.min(), abs=1e-9)
    assert hi == pytest.approx(vals.max(), abs=1e-9)
    g = V.gradient(r)
    second = np.abs(np.diff(g) / np.diff(r))
    assert lip == pytest.approx(second.max(), rel=1e-3, abs=1e-9)


@pytest.mark.parametrize("V", FAMILIES[1:], ids=lambda V: V.label)
def test_gradient_matches_central_difference(V):
    r = np.linspace(0.1, V.radius - 0.1, 50)
    h = 1e-6
    fd = (V.value(r + h) - V.value(r - h)) / (2 * h)
    np.testing.assert_allclose(V.gradient(r), fd, rtol=1e-6, atol=1e-7)


@pytest.mark.parametrize("V", FAMILIES, ids=lambda V: V.label)
def test_scalar_fn_agrees_with_value(V):
    f = V.scalar_fn()
    for r in np.linspace(0.0, V.radius, 17):
        assert f(float(r)) == pytest.approx(float(V.value(r)), rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(FAMILIES), st.floats(min_value=0.5, max_value=1e4), st.floats(min_value=0.0, max_value=1.0))
def test_rescaled_profile_is_composition(V, scale, frac):
    z = frac * V.radius * scale
    W = V.rescaled(scale)
    assert float(W.value(z)) == pytest.approx(float(V.value(z / scale)), rel=1e-12)
    assert W.radius == pytest.approx(V.radius * scale)


def test_polynomial_needs_k_at_least_two():
    with pytest.raises(DomainError):
        CurvatureProfile("polynomial", k=1.5)


def test_unknown_family_and_bad_alpha():
    with pytest.raises(DomainError):
        CurvatureProfile("gaussian")
    with pytest.raises(DomainError):
        CurvatureProfile(alpha=1.5)


def test_declared_consistency():
    assert CurvatureProfile().declared_consistent()
    assert not CurvatureProfile("polynomial", V0=8, eps=0.5, a=8, b=11, A=8).declared_consistent()
    assert CurvatureProfile("polynomial", V0=8, eps=0.5, a=8, b=12, A=8).declared_consistent()
