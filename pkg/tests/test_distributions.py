import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from mixmarket import (
    LinearDensity,
    PiecewiseLinear,
    Power,
    TruncatedExponential,
    TruncatedNormal,
    Uniform,
    check_regularity,
    g_function,
    g_slope,
    hazard_rate,
    make_distribution,
    standard_monopoly_price,
    tail_virtual_surplus,
    virtual_value,
    virtual_value_slope,
)
from mixmarket.errors import DomainError, ParameterError

ALL = [
    Uniform(0.0, 1.0),
    Uniform(1.0, 2.0),
    LinearDensity(0.0, 1.0, alpha=1.0, beta=1.0),
    Power(0.0, 1.0, c=2.0),
    TruncatedNormal(0.0, 1.0, mu=0.5, sigma=0.2),
    TruncatedExponential(1.0, 3.0, rate=2.0),
    PiecewiseLinear(0.0, 2.0, heights=(1.0, 1.2, 1.0)),
]
IDS = [d.describe() for d in ALL]
# two sharp peaks make the virtual value fall in between
BUMPY = PiecewiseLinear(0.0, 1.0, heights=(0.2, 3.0, 0.1, 3.0, 0.2))


def interior(d, n=201):
    return np.linspace(d.v_lo, d.v_hi, n)[1:-1]


def off_knots(d, v):
    """Drop points near a spline knot, where the density has a kink."""
    if not isinstance(d, PiecewiseLinear):
        return v
    segments = len(d.heights) - 1
    frac = ((v - d.v_lo) / d.width * segments) % 1
    return v[(frac > 0.05) & (frac < 0.95)]


@pytest.mark.parametrize("d", ALL, ids=IDS)
def test_regular_families_pass_check(d):
    assert d.is_regular
    assert d.regularity.min_phi_slope > 0


def test_bumpy_spline_is_not_regular():
    rep = check_regularity(BUMPY)
    assert not rep.is_regular
    assert rep.failing_points


@pytest.mark.parametrize("d", ALL, ids=IDS)
def test_cdf_endpoints_and_pdf_mass(d):
    assert d.cdf(d.v_lo) == 0.0
    assert d.cdf(d.v_hi) == pytest.approx(1.0, abs=1e-15)
    mass, _ = integrate.quad(lambda v: d.pdf(v), d.v_lo, d.v_hi, epsabs=1e-13)
    assert mass == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("d", ALL, ids=IDS)
def test_pdf_is_cdf_derivative(d):
    v = interior(d, 41)
    h = 1e-6 * d.width
    fd = (d.cdf(v + h) - d.cdf(v - h)) / (2 * h)
    np.testing.assert_allclose(d.pdf(v), fd, rtol=1e-6)


@pytest.mark.parametrize("d", ALL, ids=IDS)
def test_pdf_derivative_by_finite_difference(d):
    v = off_knots(d, interior(d, 41))
    h = 1e-5 * d.width
    fd = (d.pdf(v + h) - d.pdf(v - h)) / (2 * h)
    np.testing.assert_allclose(d.pdf_derivative(v), fd, rtol=1e-5, atol=1e-7)


@pytest.mark.parametrize("d", ALL, ids=IDS)
@settings(max_examples=60, deadline=None)
@given(u=st.floats(0.0, 1.0))
def test_quantile_inverts_cdf(d, u):
    assert d.cdf(d.quantile(u)) == pytest.approx(u, abs=1e-13)


@pytest.mark.parametrize("d", ALL, ids=IDS)
def test_sf_complements_cdf(d):
    v = np.linspace(d.v_lo, d.v_hi, 101)
    np.testing.assert_allclose(d.sf(v) + d.cdf(v), 1.0, atol=1e-15)


def test_truncated_normal_matches_scipy():
    d = TruncatedNormal(0.0, 1.0, mu=0.5, sigma=0.2)
    ref = stats.truncnorm(-2.5, 2.5, loc=0.5, scale=0.2)
    v = np.linspace(0.0, 1.0, 51)
    np.testing.assert_allclose(d.cdf(v), ref.cdf(v), atol=1e-14)
    np.testing.assert_allclose(d.pdf(v), ref.pdf(v), rtol=1e-12)


def test_truncated_exponential_matches_scipy():
    d = TruncatedExponential(1.0, 3.0, rate=2.0)
    ref = stats.truncexpon(b=4.0, loc=1.0, scale=0.5)
    v = np.linspace(1.0, 3.0, 51)
    np.testing.assert_allclose(d.cdf(v), ref.cdf(v), atol=1e-14)


@pytest.mark.parametrize("d", ALL, ids=IDS)
def test_tail_identity(d):
    """The virtual surplus above v equals the revenue of pricing at v."""
    for v in np.linspace(d.v_lo, d.v_hi, 7)[:-1]:
        lhs, _ = integrate.quad(lambda t: virtual_value(d, t) * d.pdf(t), v, d.v_hi,
                                epsabs=1e-12, limit=200)
        assert lhs == pytest.approx(v * d.sf(v), abs=1e-9)
        assert tail_virtual_surplus(d, v) == pytest.approx(v * d.sf(v), abs=1e-12)


@pytest.mark.parametrize("d", ALL, ids=IDS)
def test_g_slope_is_phi_slope_times_cdf(d):
    v = off_knots(d, interior(d, 41))
    np.testing.assert_allclose(g_slope(d, v), virtual_value_slope(d, v) * d.cdf(v), rtol=1e-10, atol=1e-14)
    h = 1e-6 * d.width
    fd = (g_function(d, v + h) - g_function(d, v - h)) / (2 * h)
    np.testing.assert_allclose(g_slope(d, v), fd, rtol=1e-5, atol=1e-8)


@pytest.mark.parametrize("d", ALL, ids=IDS)
def test_virtual_value_slope_by_finite_difference(d):
    v = off_knots(d, interior(d, 41))
    h = 1e-6 * d.width
    fd = (virtual_value(d, v + h) - virtual_value(d, v - h)) / (2 * h)
    np.testing.assert_allclose(virtual_value_slope(d, v), fd, rtol=1e-5)


def test_uniform_closed_forms():
    d = Uniform(0.0, 1.0)
    v = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(virtual_value(d, v), 2 * v - 1, atol=1e-15)
    np.testing.assert_allclose(g_function(d, v), v * v, atol=1e-15)
    assert standard_monopoly_price(d) == 0.5
    assert standard_monopoly_price(Uniform(1.0, 2.0)) == 1.0
    assert standard_monopoly_price(Uniform(2.0, 3.0)) == 2.0


@pytest.mark.parametrize("d", ALL, ids=IDS)
def test_monopoly_price_zeroes_virtual_value(d):
    vm = standard_monopoly_price(d)
    if vm > d.v_lo:
        assert virtual_value(d, vm) == pytest.approx(0.0, abs=1e-9)
    else:
        assert virtual_value(d, d.v_lo) >= 0.0


def test_power_hazard_rate():
    d = Power(0.0, 1.0, c=2.0)
    v = np.array([0.25, 0.5])
    np.testing.assert_allclose(hazard_rate(d, v), 2 * v / (1 - v * v))


def test_make_distribution_round_trip():
    d = make_distribution("linear_density", (0, 1), (1, 1))
    assert d == LinearDensity(0.0, 1.0, alpha=1.0, beta=1.0)
    assert make_distribution("uniform", (1, 2)) == Uniform(1.0, 2.0)


@pytest.mark.parametrize("family, support, params", [
    ("nope", (0, 1), ()),
    ("uniform", (1, 0), ()),
    ("uniform", (0, 1), (3,)),
    ("power", (0, 2), (2,)),
    ("truncated_normal", (0, 1), (0.5, -1)),
])
def test_make_distribution_rejects(family, support, params):
    with pytest.raises(ParameterError):
        make_distribution(family, support, params)


def test_out_of_support_raises():
    with pytest.raises(DomainError):
        virtual_value(Uniform(0.0, 1.0), 1.5)
