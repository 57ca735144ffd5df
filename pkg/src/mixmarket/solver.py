"""Revenue-optimal mechanism against a free, rationed public option.

The optimal mechanism is a posted price. Buyers at or above a cutoff type
buy from the monopolist; the rest queue at the public option, which serves
each of them with probability ``k / F(cutoff)``. The cutoff is the unique
zero of

    r(v, k) = (k / F(v)) G(v) - phi(v) F(v)

on ``(max{v_M, F^-1(k)}, v_hi)``, where ``v_M`` is the standard monopoly price.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .distributions import (
    RegularDistribution,
    g_function,
    phi_times_cdf,
    standard_monopoly_price,
)
from .errors import DomainError, NotRegularError, ParameterError
from .numerics import bisect

CUTOFF_RTOL = 1e-12


@dataclass(frozen=True)
class MarketParams:
    capacity: float
    quality_ratio: float = 1.0
    public_price: float = 0.0
    timing: Literal["substitute", "complement"] = "substitute"

    def __post_init__(self):
        check_capacity(self.capacity)
        if not 0.0 < self.quality_ratio <= 1.0:
            raise ParameterError(f"quality_ratio must lie in (0, 1], got {self.quality_ratio}")
        if not self.public_price >= 0.0:
            raise ParameterError(f"public_price must be >= 0, got {self.public_price}")
        if self.timing not in ("substitute", "complement"):
            raise ParameterError(f"timing must be 'substitute' or 'complement', got {self.timing!r}")

    @property
    def is_baseline(self) -> bool:
        return self.quality_ratio == 1.0 and self.public_price == 0.0

    def validate_for(self, dist: RegularDistribution) -> None:
        """Raise unless ``public_price <= quality_ratio * v_lo``.

        A higher public price shuts some low types out of both suppliers;
        that case is equivalent to truncating the value distribution and is
        not modelled here.
        """
        if self.public_price > self.quality_ratio * dist.v_lo:
            raise ParameterError(
                f"public_price {self.public_price} exceeds quality_ratio * v_lo = "
                f"{self.quality_ratio * dist.v_lo}; truncate the distribution instead")


@dataclass(frozen=True)
class MechanismSolution:
    cutoff: float
    price: float
    rationing_prob: float
    induced_demand: float
    producer_surplus: float
    foc_residual: float
    capacity: float = field(default=float("nan"))

    def allocation(self, v):
        """Probability of being served by the monopolist: 1 for ``v >= cutoff``."""
        return np.where(np.asarray(v) >= self.cutoff, 1.0, 0.0)

    def transfer(self, v):
        return np.where(np.asarray(v) >= self.cutoff, self.price, 0.0)


def check_capacity(k: float) -> float:
    if not (0.0 < k < 1.0):
        raise ParameterError(f"capacity must lie in the open interval (0, 1), got {k}")
    return float(k)


def require_regular(dist: RegularDistribution) -> None:
    if not dist.is_regular:
        rep = dist.regularity
        raise NotRegularError(
            f"{dist.describe()} is not regular: virtual value slope reaches "
            f"{rep.min_phi_slope:.4g} ({len(rep.failing_points)} failing grid points)")


def foc_residual(dist: RegularDistribution, k: float, v):
    """``r(v, k)``; positive below the optimal cutoff and negative above it."""
    v = np.asarray(v, dtype=float)
    F = np.asarray(dist.cdf(v))
    if np.any(F <= 0.0):
        raise DomainError("foc_residual needs F(v) > 0")
    r = k / F * np.asarray(g_function(dist, v)) - np.asarray(phi_times_cdf(dist, v))
    return float(r) if r.ndim == 0 else r


def cutoff_bracket(dist: RegularDistribution, k: float) -> tuple[float, float]:
    """Left and right ends of the interval known to contain the cutoff."""
    lo = max(standard_monopoly_price(dist), float(dist.quantile(k)))
    if foc_residual(dist, k, lo) <= 0.0:
        lo = lo + 1e-13 * dist.width
    return lo, dist.v_hi


def solve_cutoff(dist: RegularDistribution, k: float, xtol: float | None = None) -> float:
    """Optimal cutoff type by bisection on ``r(., k)``.

    ``xtol`` defaults to ``1e-12`` times the support width; pass 0 to bisect
    down to adjacent floats.
    """
    require_regular(dist)
    k = check_capacity(k)
    lo, hi = cutoff_bracket(dist, k)
    if xtol is None:
        xtol = CUTOFF_RTOL * dist.width
    return bisect(lambda v: foc_residual(dist, k, v), lo, hi, xtol=xtol)


def mechanism_from_cutoff(dist: RegularDistribution, k: float, cutoff: float) -> MechanismSolution:
    Q = float(dist.cdf(cutoff))
    pi = k / Q
    price = cutoff * (1.0 - pi)
    return MechanismSolution(
        cutoff=cutoff,
        price=price,
        rationing_prob=pi,
        induced_demand=Q,
        producer_surplus=price * float(dist.sf(cutoff)),
        foc_residual=foc_residual(dist, k, cutoff),
        capacity=k,
    )


def solve_mechanism(dist: RegularDistribution, k: float, xtol: float | None = None) -> MechanismSolution:
    """Optimal posted-price mechanism for capacity ``k``."""
    return mechanism_from_cutoff(dist, k, solve_cutoff(dist, k, xtol=xtol))


def _check_above_capacity_quantile(dist, k, v):
    v = dist._check_support(v)
    F = np.asarray(dist.cdf(v))
    if np.any(F <= k):
        raise DomainError("cutoff must exceed the capacity quantile F^-1(k)")
    return v, F


def revenue_at_cutoff(dist: RegularDistribution, k: float, v):
    """Revenue ``(1 - k/F(v)) v (1 - F(v))`` of selling to all types at or above ``v``."""
    v, F = _check_above_capacity_quantile(dist, k, v)
    out = (1.0 - k / F) * v * np.asarray(dist.sf(v))
    return float(out) if out.ndim == 0 else out


def effective_cost(dist: RegularDistribution, k: float, v):
    """Revenue lost to the public option relative to a plain monopolist, ``(k/F(v)) v (1 - F(v))``."""
    v, F = _check_above_capacity_quantile(dist, k, v)
    out = k / F * v * np.asarray(dist.sf(v))
    return float(out) if out.ndim == 0 else out


def monopoly_only(dist: RegularDistribution) -> MechanismSolution:
    """The ``k = 0`` limit: standard monopoly price, no rationing."""
    vm = standard_monopoly_price(dist)
    return MechanismSolution(
        cutoff=vm, price=vm, rationing_prob=0.0, induced_demand=float(dist.cdf(vm)),
        producer_surplus=vm * float(dist.sf(vm)), foc_residual=0.0, capacity=0.0)


def full_capacity(dist: RegularDistribution) -> MechanismSolution:
    """The ``k = 1`` limit: the public option serves everyone and nothing is sold."""
    return MechanismSolution(
        cutoff=dist.v_hi, price=0.0, rationing_prob=1.0, induced_demand=1.0,
        producer_surplus=0.0, foc_residual=0.0, capacity=1.0)
