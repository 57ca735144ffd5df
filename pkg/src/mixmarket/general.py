"""Generalizations: a lower-quality, priced public option and complement timing.

With a public good of relative quality ``theta`` sold at price ``rho``, the
optimal mechanism is still a posted price whose cutoff maximizes

    W(v) = (1 - F(v)) [ v (1 - theta m(v)) + rho m(v) ],   m(v) = min{k / F(v), 1}.

``W`` has a kink at ``F^-1(k)`` and need not be concave, so it is maximized by
a grid scan followed by golden-section refinement of every competitive local
maximum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .distributions import RegularDistribution, standard_monopoly_price, virtual_value
from .errors import ParameterError
from .numerics import adaptive_simpson, bisect, golden_section_max
from .solver import MarketParams, check_capacity, require_regular

GRID_SIZE = 10_001
TIE_TOL = 1e-9


@dataclass(frozen=True)
class GeneralSolution:
    cutoff: float
    price: float
    regime: Literal["rationed", "slack"]
    objective_value: float
    near_tie: bool
    rationing_prob: float


@dataclass(frozen=True)
class ComplementOutcome:
    """Outcome when buyers queue at the public option first and top up privately."""

    capacity: float
    price: float
    producer_surplus: float
    aggregate_cs: float

    def surplus(self, v):
        v = np.asarray(v, dtype=float)
        out = np.where(v >= self.price, v - (1.0 - self.capacity) * self.price, self.capacity * v)
        return float(out) if out.ndim == 0 else out


def service_prob(dist: RegularDistribution, k: float, v):
    """``min{k / F(v), 1}``, taken as 1 where ``F(v) = 0``."""
    F = np.asarray(dist.cdf(v), dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(F <= k, 1.0, k / np.where(F > 0.0, F, 1.0))


def op_objective(dist: RegularDistribution, params: MarketParams, v):
    params.validate_for(dist)
    v = dist._check_support(v)
    m = service_prob(dist, params.capacity, v)
    out = np.asarray(dist.sf(v)) * (v * (1.0 - params.quality_ratio * m) + params.public_price * m)
    return float(out) if out.ndim == 0 else out


def posted_price(dist: RegularDistribution, params: MarketParams, cutoff: float) -> float:
    m = float(service_prob(dist, params.capacity, cutoff))
    return cutoff * (1.0 - params.quality_ratio * m) + params.public_price * m


def solve_general(dist: RegularDistribution, params: MarketParams,
                  grid_size: int = GRID_SIZE) -> GeneralSolution:
    """Global maximizer of the cutoff objective; ties go to the smaller cutoff."""
    require_regular(dist)
    params.validate_for(dist)
    grid = np.linspace(dist.v_lo, dist.v_hi, grid_size)
    vals = np.asarray(op_objective(dist, params, grid))
    best = vals.max()
    window = 1e-7 * max(1.0, abs(best))

    padded = np.concatenate([[-np.inf], vals, [-np.inf]])
    is_peak = (padded[1:-1] >= padded[:-2]) & (padded[1:-1] >= padded[2:])
    candidates = np.flatnonzero(is_peak & (vals >= best - window))

    def objective(x):
        return op_objective(dist, params, x)

    refined = []
    for i in candidates:
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, grid_size - 1)]
        refined.append(golden_section_max(objective, float(a), float(b), xtol=1e-12 * dist.width))
    top_val = max(t[1] for t in refined)
    tied = [t for t in refined if top_val - t[1] < TIE_TOL]
    cutoff, value = min(tied, key=lambda t: t[0])
    # adjacent grid peaks that refine to the same optimum are not a tie
    step = dist.width / (grid_size - 1)
    rival = any(abs(x - cutoff) > 2.0 * step for x, _ in tied)

    k = params.capacity
    F = float(dist.cdf(cutoff))
    m = float(service_prob(dist, k, cutoff))
    regime = "rationed" if F > k else "slack"
    inner_degenerate = 1.0 - params.quality_ratio * m == 0.0
    return GeneralSolution(
        cutoff=cutoff,
        price=posted_price(dist, params, cutoff),
        regime=regime,
        objective_value=value,
        near_tie=rival or inner_degenerate,
        rationing_prob=m,
    )


def bertrand_limit_cutoff(dist: RegularDistribution, quality_ratio: float, public_price: float) -> float:
    """Smallest ``v`` with ``(1 - theta) phi(v) + rho >= 0``.

    This is the cutoff as capacity and quality ratio approach one while the
    public price stays bounded away from zero; it never exceeds the standard
    monopoly price.
    """
    if not (0.0 < quality_ratio <= 1.0) or public_price < 0.0:
        raise ParameterError("need quality_ratio in (0, 1] and public_price >= 0")
    if quality_ratio == 1.0 and public_price == 0.0:
        raise ParameterError("quality_ratio = 1 with public_price = 0 makes the expression vanish identically")

    def expr(v):
        return (1.0 - quality_ratio) * virtual_value(dist, v) + public_price

    if expr(dist.v_lo) >= 0.0:
        return dist.v_lo
    return bisect(expr, dist.v_lo, dist.v_hi, xtol=1e-12 * dist.width)


def complement_outcome(dist: RegularDistribution, k: float, tol: float = 1e-9) -> ComplementOutcome:
    """Everyone queues first, so rationing is exactly ``k`` and the firm charges the monopoly price."""
    require_regular(dist)
    k = check_capacity(k)
    vm = standard_monopoly_price(dist)
    low = adaptive_simpson(lambda v: k * v * float(dist.pdf(v)), dist.v_lo, vm, tol / 2)
    high = adaptive_simpson(lambda v: (v - (1.0 - k) * vm) * float(dist.pdf(v)), vm, dist.v_hi, tol / 2)
    return ComplementOutcome(
        capacity=k,
        price=vm,
        producer_surplus=(1.0 - k) * vm * float(dist.sf(vm)),
        aggregate_cs=low + high,
    )
