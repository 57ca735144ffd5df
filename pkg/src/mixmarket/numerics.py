"""Scalar root finding, quadrature and line search used across the package.

Everything here works on plain Python floats. The routines are small on
purpose: bisection and golden-section search have guaranteed convergence on
the brackets the model provides, and the adaptive Simpson rule is only used
where a closed form is not available or as an independent cross-check.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import ConvergenceError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 0.0,
           maxiter: int = 400) -> float:
    """Root of ``f`` on ``[lo, hi]`` by bisection.

    ``f(lo)`` and ``f(hi)`` must have strictly opposite signs. Iteration stops
    when the bracket is narrower than ``xtol`` or when the midpoint can no
    longer be represented between the endpoints (so ``xtol=0`` means full
    machine precision).
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (flo > 0.0) ^ (fhi > 0.0) or math.isnan(flo) or math.isnan(fhi):
        raise ConvergenceError(
            f"bisection bracket [{lo!r}, {hi!r}] has no sign change "
            f"(f(lo)={flo!r}, f(hi)={fhi!r})")
    for _ in range(maxiter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return 0.5 * (lo + hi)


def bisect_array(f: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray,
                 iterations: int = 64) -> np.ndarray:
    """Elementwise bisection for an increasing vectorized ``f`` with root in ``[lo, hi]``.

    No sign check; callers guarantee ``f(lo) <= 0 <= f(hi)`` elementwise.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = f(mid) < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _simpson_step(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-9, max_depth: int = 50) -> float:
    """Integral of ``f`` over ``[a, b]`` by adaptive Simpson with Richardson correction.

    ``tol`` is an absolute tolerance on the whole interval; it is split in half
    at every subdivision. Uses an explicit stack so deep refinement near a
    singular derivative does not hit the recursion limit.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson_step(f, a, fa, b, fb)
    total = 0.0
    stack = [(a, fa, b, fb, m, fm, whole, tol, 0)]
    while stack:
        a, fa, b, fb, m, fm, whole, eps, depth = stack.pop()
        lm, flm, left = _simpson_step(f, a, fa, m, fm)
        rm, frm, right = _simpson_step(f, m, fm, b, fb)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((a, fa, m, fm, lm, flm, left, 0.5 * eps, depth + 1))
            stack.append((m, fm, b, fb, rm, frm, right, 0.5 * eps, depth + 1))
    return sign * total


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       xtol: float = 1e-12, maxiter: int = 200) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``.

    The endpoints are compared against the interior optimum at the end, so a
    maximum sitting on the boundary of the bracket is returned exactly.
    """
    lo, hi = a, b
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if hi - lo <= xtol:
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    # ties resolved toward the smaller abscissa
    for x in (a, b):
        fx = f(x)
        if fx > best_f or (fx == best_f and x < best_x):
            best_x, best_f = x, fx
    return best_x, best_f


def central_difference(f: Callable[[float], float], x: float, h: float) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)
