import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from conftest import regular_families
from mixmarket import (
    MarketParams,
    PiecewiseLinear,
    Uniform,
    effective_cost,
    foc_residual,
    full_capacity,
    monopoly_only,
    revenue_at_cutoff,
    solve_cutoff,
    solve_mechanism,
    standard_monopoly_price,
)
from mixmarket.errors import DomainError, NotRegularError, ParameterError
from mixmarket.oracle import grid_argmax_revenue
from mixmarket.solver import cutoff_bracket

# uniform[1, 2] reference values, from 50-digit root finding on (k/F) G = phi F
U12_REFERENCE = {
    0.01: (1.17268061142, 1.10477023041),
    0.3: (1.58632675118, None),
    0.5: (1.72527008507203, 0.535871735),
}


@pytest.mark.parametrize("k", np.arange(1, 10) * 0.1)
def test_uniform_closed_forms(k):
    m = solve_mechanism(Uniform(0.0, 1.0), k)
    assert m.cutoff == pytest.approx((1 + k) / 2, abs=1e-10)
    assert m.rationing_prob == pytest.approx(2 * k / (1 + k), abs=1e-10)
    assert m.price == pytest.approx((1 - k) / 2, abs=1e-10)
    assert m.producer_surplus == pytest.approx((1 - k) ** 2 / 4, abs=1e-10)


@pytest.mark.parametrize("k, ref", U12_REFERENCE.items())
def test_uniform_shifted_reference(k, ref):
    m = solve_mechanism(Uniform(1.0, 2.0), k)
    cutoff, price = ref
    assert m.cutoff == pytest.approx(cutoff, abs=1e-10)
    if price is not None:
        assert m.price == pytest.approx(price, abs=1e-9)


def test_small_capacity_cube_root_scaling():
    # for uniform[1, 2] the cutoff behaves like 1 + (k/2)^(1/3) as k -> 0
    for k in (1e-6, 1e-5):
        assert solve_cutoff(Uniform(1.0, 2.0), k) - 1 == pytest.approx((k / 2) ** (1 / 3), rel=0.05)


def test_independent_brentq_route(family):
    """Revenue first-order condition written from scratch, solved with scipy."""
    d = family
    for k in (0.1, 0.5, 0.9):
        def dR(v):
            F, f, S = d.cdf(v), d.pdf(v), d.sf(v)
            return (k * f / F ** 2) * v * S + (1 - k / F) * (S - v * f)
        lo = max(standard_monopoly_price(d), d.quantile(k)) + 1e-9
        root = optimize.brentq(dR, lo, d.v_hi - 1e-12, xtol=1e-14)
        assert solve_cutoff(d, k) == pytest.approx(root, abs=1e-9)


def test_matches_grid_argmax(family):
    for k in (0.05, 0.5, 0.95):
        a = family.quantile(k)
        step = (family.v_hi - a) / 10_001
        assert abs(grid_argmax_revenue(family, k) - solve_cutoff(family, k)) <= step


@settings(max_examples=40, deadline=None)
@given(k=st.floats(0.001, 0.999))
def test_residual_sign_pattern(k):
    d = Uniform(1.0, 2.0)
    lo, hi = cutoff_bracket(d, k)
    root = solve_cutoff(d, k)
    assert lo < root < hi
    assert foc_residual(d, k, (lo + root) / 2) > 0
    assert foc_residual(d, k, (root + hi) / 2) < 0


@settings(max_examples=40, deadline=None)
@given(k=st.floats(0.001, 0.999))
def test_solution_invariants(k):
    for d in (Uniform(0.0, 1.0), Uniform(1.0, 2.0)):
        m = solve_mechanism(d, k)
        vm = standard_monopoly_price(d)
        assert m.cutoff > max(vm, d.quantile(k))
        assert 0 < m.rationing_prob < 1
        assert m.rationing_prob == pytest.approx(k / d.cdf(m.cutoff))
        # the cutoff type is indifferent between buying and queueing
        assert m.cutoff - m.price == pytest.approx(m.rationing_prob * m.cutoff, abs=1e-14)
        assert m.producer_surplus <= vm * d.sf(vm) + 1e-15


def test_revenue_decomposition():
    d = Uniform(0.0, 1.0)
    v = np.linspace(0.6, 0.99, 9)
    np.testing.assert_allclose(revenue_at_cutoff(d, 0.5, v) + effective_cost(d, 0.5, v), v * (1 - v))


def test_revenue_below_capacity_quantile_rejected():
    with pytest.raises(DomainError):
        revenue_at_cutoff(Uniform(0.0, 1.0), 0.5, 0.4)


def test_limits():
    d = Uniform(0.0, 1.0)
    mono = monopoly_only(d)
    assert (mono.cutoff, mono.price, mono.producer_surplus) == (0.5, 0.5, 0.25)
    full = full_capacity(d)
    assert (full.price, full.rationing_prob, full.producer_surplus) == (0.0, 1.0, 0.0)
    assert solve_mechanism(d, 1e-9).price == pytest.approx(0.5, abs=1e-8)
    assert solve_mechanism(d, 1 - 1e-9).price == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("k", [0.0, 1.0, -0.1, 1.5])
def test_capacity_out_of_range(k):
    with pytest.raises(ParameterError):
        solve_mechanism(Uniform(0.0, 1.0), k)


def test_non_regular_refused():
    with pytest.raises(NotRegularError):
        solve_mechanism(PiecewiseLinear(0.0, 1.0, heights=(0.2, 3.0, 0.1, 3.0, 0.2)), 0.5)


def test_market_params_validation():
    with pytest.raises(ParameterError):
        MarketParams(0.5, quality_ratio=0.0)
    with pytest.raises(ParameterError):
        MarketParams(0.5, timing="later")
    with pytest.raises(ParameterError):
        MarketParams(0.5, 0.5, 0.6).validate_for(Uniform(1.0, 2.0))
    MarketParams(0.5, 0.5, 0.5).validate_for(Uniform(1.0, 2.0))
    assert MarketParams(0.5).is_baseline


def test_xtol_zero_reaches_adjacent_floats():
    d = Uniform(1.0, 2.0)
    a = solve_cutoff(d, 0.5, xtol=0.0)
    assert a == pytest.approx(1.7252700850720346, abs=4.5e-16)


def test_families_produce_valid_mechanisms():
    for d in regular_families():
        m = solve_mechanism(d, 0.4)
        assert abs(m.foc_residual) < 1e-9
