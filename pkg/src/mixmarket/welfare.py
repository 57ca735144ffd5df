"""Consumer and producer welfare, and how they move with capacity.

The capacity derivatives come from implicit differentiation of the cutoff
condition ``r(cutoff(k), k) = 0``:

    cutoff'(k) = -(G/F) / (dr/dv)
    pi'(k)     = cutoff'/G * (phi f + G' (1 - pi))
    p'(k)      = cutoff' (1 - pi) - cutoff pi'
    P'(k)      = -cutoff (1 - F(cutoff)) / F(cutoff)        (envelope theorem)

all evaluated at the optimal cutoff.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .distributions import (
    RegularDistribution,
    g_function,
    g_slope,
    hazard_rate,
    standard_monopoly_price,
    virtual_value,
    virtual_value_slope,
)
from .errors import DegenerateSlopeError, DomainError, MixMarketError, ParameterError
from .numerics import adaptive_simpson, bisect
from .solver import MechanismSolution, check_capacity, require_regular, solve_mechanism

QUAD_TOL = 1e-9


@dataclass(frozen=True)
class WelfareReport:
    k: float
    cutoff: float
    price: float
    rationing_prob: float
    types: np.ndarray = field(repr=False)
    surplus: np.ndarray = field(repr=False)
    aggregate_consumer_surplus: float = 0.0
    producer_surplus: float = 0.0
    total_surplus: float = 0.0


@dataclass(frozen=True)
class ConditionReport:
    holds_everywhere: bool
    grid: np.ndarray = field(repr=False)
    lhs_samples: np.ndarray = field(repr=False)
    failing_intervals: list = field(default_factory=list)
    threshold_root: float | None = None


class BottomPriceCheck(NamedTuple):
    applicable: bool
    price_decreasing: bool


SWEEP_COLUMNS = (
    "k", "cutoff", "rationing_prob", "price", "producer_surplus",
    "consumer_surplus", "total_surplus", "theta_prime", "pi_prime",
    "p_prime", "P_prime", "foc_residual",
)


@dataclass(frozen=True)
class SweepResult:
    """One row per capacity; columns follow ``SWEEP_COLUMNS``."""

    dist: RegularDistribution
    k: np.ndarray
    cutoff: np.ndarray
    rationing_prob: np.ndarray
    price: np.ndarray
    producer_surplus: np.ndarray
    consumer_surplus: np.ndarray
    total_surplus: np.ndarray
    theta_prime: np.ndarray
    pi_prime: np.ndarray
    p_prime: np.ndarray
    P_prime: np.ndarray
    foc_residual: np.ndarray

    def rows(self):
        cols = [getattr(self, c) for c in SWEEP_COLUMNS]
        return [tuple(float(c[i]) for c in cols) for i in range(len(self.k))]

    def column(self, name: str) -> np.ndarray:
        if name not in SWEEP_COLUMNS:
            raise KeyError(name)
        return getattr(self, name)


class SweepError(MixMarketError):
    def __init__(self, k: float, cause: Exception):
        super().__init__(f"sweep failed at k={k!r}: {cause}")
        self.k = k
        self.cause = cause


def _mech(dist, k, mech):
    return mech if mech is not None else solve_mechanism(dist, k)


def consumer_surplus(dist: RegularDistribution, k: float, v, mech: MechanismSolution | None = None):
    """Surplus of type ``v``: ``pi v`` when queueing, ``v - p`` when buying."""
    m = _mech(dist, k, mech)
    v = dist._check_support(v)
    out = np.where(v >= m.cutoff, v - m.price, m.rationing_prob * v)
    return float(out) if out.ndim == 0 else out


def aggregate_consumer_surplus(dist: RegularDistribution, k: float,
                               mech: MechanismSolution | None = None, tol: float = QUAD_TOL) -> float:
    m = _mech(dist, k, mech)
    # split at the cutoff, where the surplus has a kink
    lower = adaptive_simpson(lambda v: v * float(dist.pdf(v)), dist.v_lo, m.cutoff, tol / 2)
    upper = adaptive_simpson(lambda v: (v - m.price) * float(dist.pdf(v)), m.cutoff, dist.v_hi, tol / 2)
    return m.rationing_prob * lower + upper


def welfare_report(dist: RegularDistribution, k: float, type_grid: int | Sequence[float] = 201,
                   mech: MechanismSolution | None = None) -> WelfareReport:
    m = _mech(dist, k, mech)
    if np.ndim(type_grid) == 0:
        types = np.linspace(dist.v_lo, dist.v_hi, int(type_grid))
    else:
        types = np.asarray(type_grid, dtype=float)
    cs = aggregate_consumer_surplus(dist, k, mech=m)
    return WelfareReport(
        k=k, cutoff=m.cutoff, price=m.price, rationing_prob=m.rationing_prob,
        types=types, surplus=consumer_surplus(dist, k, types, mech=m),
        aggregate_consumer_surplus=cs, producer_surplus=m.producer_surplus,
        total_surplus=cs + m.producer_surplus)


def residual_slope(dist: RegularDistribution, k: float, v: float) -> float:
    """``dr/dv`` at ``v``."""
    F = float(dist.cdf(v))
    f = float(dist.pdf(v))
    G = g_function(dist, v)
    dG = g_slope(dist, v)
    phi = virtual_value(dist, v)
    dphi = virtual_value_slope(dist, v)
    return k * (dG * F - G * f) / (F * F) - dphi * F - phi * f


def cutoff_sensitivity(dist: RegularDistribution, k: float, mech: MechanismSolution | None = None) -> float:
    m = _mech(dist, k, mech)
    slope = residual_slope(dist, k, m.cutoff)
    if abs(slope) < 1e-14:
        raise DegenerateSlopeError(f"dr/dv vanishes at cutoff {m.cutoff} (k={k})")
    return -(g_function(dist, m.cutoff) / m.induced_demand) / slope


def rationing_sensitivity(dist: RegularDistribution, k: float, mech: MechanismSolution | None = None) -> float:
    m = _mech(dist, k, mech)
    v = m.cutoff
    dtheta = cutoff_sensitivity(dist, k, mech=m)
    return dtheta / g_function(dist, v) * (
        virtual_value(dist, v) * float(dist.pdf(v)) + g_slope(dist, v) * (1.0 - m.rationing_prob))


def price_sensitivity(dist: RegularDistribution, k: float, mech: MechanismSolution | None = None) -> float:
    m = _mech(dist, k, mech)
    dtheta = cutoff_sensitivity(dist, k, mech=m)
    dpi = rationing_sensitivity(dist, k, mech=m)
    return dtheta * (1.0 - m.rationing_prob) - m.cutoff * dpi


def producer_surplus_sensitivity(dist: RegularDistribution, k: float,
                                 mech: MechanismSolution | None = None) -> float:
    m = _mech(dist, k, mech)
    return -m.cutoff * float(dist.sf(m.cutoff)) / m.induced_demand


def condition_lhs(dist: RegularDistribution, v):
    """``v f/(1-F) + v G'/G``; capacity growth lowers the price wherever this is >= 2."""
    v = np.asarray(v, dtype=float)
    vm = standard_monopoly_price(dist)
    if np.any(~((v > vm) & (v < dist.v_hi))):
        raise DomainError(f"condition is defined on ({vm}, {dist.v_hi}); got {v}")
    G = np.asarray(g_function(dist, v))
    out = v * np.asarray(hazard_rate(dist, v)) + v * np.asarray(g_slope(dist, v)) / G
    return float(out) if out.ndim == 0 else out


def check_condition(dist: RegularDistribution, grid_size: int = 10_001,
                    xtol: float = 1e-9) -> ConditionReport:
    """Locate the intervals of ``(v_M, v_hi)`` where the price-monotonicity condition fails."""
    if grid_size < 1001:
        raise ParameterError("condition grid needs at least 1001 points")
    vm = standard_monopoly_price(dist)
    grid = np.linspace(vm, dist.v_hi, grid_size + 2)[1:-1]
    lhs = np.asarray(condition_lhs(dist, grid))
    fails = lhs < 2.0

    def excess(v):
        return condition_lhs(dist, v) - 2.0

    intervals = []
    start = vm if fails[0] else None
    roots = []
    for i in range(1, len(grid)):
        if fails[i] == fails[i - 1]:
            continue
        root = float(bisect(excess, float(grid[i - 1]), float(grid[i]), xtol=xtol))
        roots.append(root)
        if fails[i]:
            start = root
        else:
            intervals.append((start, root))
            start = None
    if start is not None:
        intervals.append((start, dist.v_hi))
    threshold = None
    if len(roots) == 1 and vm == dist.v_lo:
        threshold = roots[0]
    return ConditionReport(holds_everywhere=not intervals, grid=grid, lhs_samples=lhs,
                           failing_intervals=intervals, threshold_root=threshold)


def ifr_bottom_price_check(dist: RegularDistribution, grid_size: int = 10_001) -> BottomPriceCheck:
    """Shortcut test for IFR distributions whose monopoly price is the bottom of the support."""
    vm = standard_monopoly_price(dist)
    grid = np.linspace(dist.v_lo, dist.v_hi, grid_size)[:-1]
    h = np.asarray(hazard_rate(dist, grid))
    ifr = bool(np.all(np.diff(h) >= -1e-12 * np.abs(h[1:])))
    applicable = abs(vm - dist.v_lo) <= 1e-10 and ifr
    return BottomPriceCheck(applicable=applicable,
                          price_decreasing=float(dist.pdf(dist.v_lo)) * dist.v_lo >= 2.0)


def entry_gain(dist: RegularDistribution, k: float, v, mech: MechanismSolution | None = None):
    """Gain from adding the monopolist to a public-option-only market, ``U(v, k) - k v``."""
    m = _mech(dist, k, mech)
    v = dist._check_support(v)
    out = np.asarray(consumer_surplus(dist, k, v, mech=m)) - k * v
    return float(out) if out.ndim == 0 else out


def _sweep_point(dist, k):
    try:
        m = solve_mechanism(dist, k)
        cs = aggregate_consumer_surplus(dist, k, mech=m)
        return (k, m.cutoff, m.rationing_prob, m.price, m.producer_surplus, cs,
                cs + m.producer_surplus,
                cutoff_sensitivity(dist, k, mech=m), rationing_sensitivity(dist, k, mech=m),
                price_sensitivity(dist, k, mech=m), producer_surplus_sensitivity(dist, k, mech=m),
                m.foc_residual)
    except MixMarketError as exc:
        raise SweepError(k, exc) from exc


def worker_count(requested: int | None = None) -> int:
    """Thread cap: explicit request, else ``MIXMARKET_THREADS``, else 1."""
    if requested is None:
        requested = int(os.environ.get("MIXMARKET_THREADS", "1") or 1)
    return max(1, int(requested))


def sweep(dist: RegularDistribution, k_grid: Sequence[float], workers: int | None = None) -> SweepResult:
    """Equilibrium quantities and capacity derivatives over a strictly increasing grid."""
    require_regular(dist)
    ks = np.asarray(k_grid, dtype=float)
    if ks.ndim != 1 or ks.size == 0:
        raise ParameterError("k_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(ks) <= 0.0):
        raise ParameterError("k_grid must be strictly increasing")
    for k in ks:
        check_capacity(float(k))
    n = worker_count(workers)
    if n == 1:
        rows = [_sweep_point(dist, float(k)) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(lambda k: _sweep_point(dist, float(k)), ks))
    cols = np.array(rows, dtype=float).T
    return SweepResult(dist, *cols)
