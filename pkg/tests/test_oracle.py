import numpy as np
import pytest

from mixmarket import MechanismSolution, Uniform, solve_mechanism
from mixmarket.errors import ParameterError
from mixmarket.oracle import (
    buyer_cutoff,
    grid_argmax_revenue,
    posted_price_best_response,
    simulate_market,
    two_step_dominance_check,
    uniform_stream,
    verify_ic_ir,
)


def test_grid_argmax_needs_resolution():
    with pytest.raises(ParameterError):
        grid_argmax_revenue(Uniform(0.0, 1.0), 0.5, n_points=10)


def test_grid_argmax_uniform():
    assert grid_argmax_revenue(Uniform(0.0, 1.0), 0.5) == pytest.approx(0.75, abs=1e-4)


def test_ic_clean_for_optimum_and_dirty_for_shifted_price(family):
    m = solve_mechanism(family, 0.5)
    assert verify_ic_ir(family, 0.5, m).clean()
    shifted = MechanismSolution(m.cutoff, m.price + 0.05, m.rationing_prob, m.induced_demand,
                                m.producer_surplus, m.foc_residual, 0.5)
    rep = verify_ic_ir(family, 0.5, shifted)
    assert rep.max_ic_violation == pytest.approx(0.05, abs=1e-12)


def test_buyer_cutoff_edges():
    d = Uniform(0.0, 1.0)
    c = buyer_cutoff(d, 0.5, [0.0, 0.25, 0.6])
    assert c[0] == pytest.approx(0.5)
    assert c[1] == pytest.approx(0.75, abs=1e-12)
    assert c[2] == 1.0


def test_posted_price_matches_solver():
    for d in (Uniform(0.0, 1.0), Uniform(1.0, 2.0)):
        curve = posted_price_best_response(d, 0.5)
        step = d.v_hi / 10_000
        assert abs(curve.best_price - solve_mechanism(d, 0.5).price) <= step


def test_two_step_dominance_includes_step_rule():
    d = Uniform(0.0, 1.0)
    excess = two_step_dominance_check(d, 0.5, 0.75)
    assert excess == 0.0
    # off the optimum a lottery can still not beat its own step rule
    assert two_step_dominance_check(d, 0.5, 0.9, quality_ratio=0.8, public_price=0.0) <= 1e-12


def test_uniform_stream_chunking_invariant():
    a = uniform_stream(3, 0, 200_000, workers=1)
    b = uniform_stream(3, 0, 200_000, workers=3)
    np.testing.assert_array_equal(a, b)
    # a prefix of a longer stream is the shorter stream
    np.testing.assert_array_equal(uniform_stream(3, 0, 70_000), a[:70_000])
    assert not np.array_equal(uniform_stream(3, 1, 1000), a[:1000])


def test_simulation_near_theory_small():
    d = Uniform(0.0, 1.0)
    r = simulate_market(d, 0.5, 0.25, n_buyers=200_000, seed=5)
    assert abs(r.realized_revenue - 0.0625) < 4 * r.std_error_revenue
    assert abs(r.realized_rationing_prob - 2 / 3) < 4 * r.std_error_rationing
    assert abs(r.mean_consumer_surplus - 0.34375) < 4 * r.std_error_cs


def test_simulation_prohibitive_price():
    r = simulate_market(Uniform(0.0, 1.0), 0.5, 1.0, n_buyers=10_000, seed=0)
    assert r.buyers == 0
    assert r.realized_revenue == 0.0
    assert r.realized_rationing_prob == pytest.approx(0.5)


def test_simulation_reproducible():
    d = Uniform(1.0, 2.0)
    assert simulate_market(d, 0.3, 0.6, 50_000, seed=2) == simulate_market(d, 0.3, 0.6, 50_000, seed=2)


def test_simulation_rejects_tiny_population():
    with pytest.raises(ParameterError):
        simulate_market(Uniform(0.0, 1.0), 0.5, 0.25, n_buyers=10)
