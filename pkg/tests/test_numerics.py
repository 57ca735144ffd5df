import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from mixmarket.errors import ConvergenceError
from mixmarket.numerics import adaptive_simpson, bisect, bisect_array, central_difference, golden_section_max


def test_bisect_finds_sqrt2():
    assert bisect(lambda x: x * x - 2.0, 0.0, 2.0) == pytest.approx(math.sqrt(2.0), abs=4e-16)


def test_bisect_respects_xtol():
    root = bisect(lambda x: x - 0.3, 0.0, 1.0, xtol=1e-3)
    assert abs(root - 0.3) <= 1e-3


def test_bisect_rejects_same_sign():
    with pytest.raises(ConvergenceError):
        bisect(lambda x: x * x + 1.0, -1.0, 1.0)


def test_bisect_exact_endpoint_root():
    assert bisect(lambda x: x, 0.0, 1.0) == 0.0


@given(st.floats(0.01, 0.99))
def test_bisect_array_matches_scalar(c):
    lo = np.zeros(3)
    hi = np.ones(3)
    out = bisect_array(lambda x: x ** 3 - c * np.array([1.0, 0.5, 0.25]), lo, hi)
    want = np.cbrt(c * np.array([1.0, 0.5, 0.25]))
    np.testing.assert_allclose(out, want, atol=1e-12)


@pytest.mark.parametrize("f, a, b", [
    (np.sin, 0.0, np.pi),
    (lambda x: math.exp(-x * x), -3.0, 2.0),
    (lambda x: math.sqrt(x), 0.0, 1.0),
    (lambda x: abs(x - 0.3), 0.0, 1.0),
])
def test_adaptive_simpson_agrees_with_quad(f, a, b):
    want, _ = integrate.quad(f, a, b, epsabs=1e-13, points=[0.3] if a < 0.3 < b else None)
    assert adaptive_simpson(f, a, b, tol=1e-10) == pytest.approx(want, abs=1e-9)


def test_adaptive_simpson_empty_interval():
    assert adaptive_simpson(math.exp, 1.0, 1.0) == 0.0


@settings(max_examples=50)
@given(st.floats(0.05, 0.95))
def test_golden_section_locates_parabola_peak(m):
    x, fx = golden_section_max(lambda t: -(t - m) ** 2, 0.0, 1.0)
    assert abs(x - m) < 1e-7
    assert fx == pytest.approx(0.0, abs=1e-14)


def test_golden_section_prefers_endpoint_maximum():
    x, fx = golden_section_max(lambda t: t, 0.0, 1.0)
    assert x == 1.0 and fx == 1.0


def test_central_difference_cubic():
    assert central_difference(lambda t: t ** 3, 2.0, 1e-4) == pytest.approx(12.0, rel=1e-8)
