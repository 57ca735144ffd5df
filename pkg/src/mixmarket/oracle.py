"""Brute-force and Monte Carlo checks that do not go through the root finder.

None of these functions call ``solve_cutoff``; they are meant to be compared
against it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .distributions import RegularDistribution
from .errors import ConvergenceError, ParameterError
from .numerics import bisect_array
from .solver import MechanismSolution, check_capacity
from .welfare import worker_count

CHUNK = 1 << 16  # buyers per random-stream chunk; multiple of 4 (Philox block)

STREAM_VALUES = 0
STREAM_LOTTERY = 1


@dataclass(frozen=True)
class ICReport:
    max_ic_violation: float
    max_ir_violation: float
    worst_pair: tuple[float, float]

    def clean(self, tol: float = 1e-12) -> bool:
        return self.max_ic_violation <= tol and self.max_ir_violation <= tol


@dataclass(frozen=True)
class PriceCurve:
    best_price: float
    prices: np.ndarray
    revenues: np.ndarray
    cutoffs: np.ndarray


@dataclass(frozen=True)
class SimulationResult:
    n_buyers: int
    seed: int
    realized_demand_share: float
    realized_rationing_prob: float
    realized_revenue: float
    mean_consumer_surplus: float
    std_error_cs: float
    std_error_revenue: float
    std_error_rationing: float
    buyers: int


def grid_argmax_revenue(dist: RegularDistribution, k: float, n_points: int = 10_001) -> float:
    """Best cutoff on a uniform grid over ``(F^-1(k), v_hi]``."""
    if n_points < 1001:
        raise ParameterError("grid oracle needs at least 1001 points")
    k = check_capacity(k)
    a = float(dist.quantile(k))
    grid = np.linspace(a, dist.v_hi, n_points + 1)[1:]
    F = np.asarray(dist.cdf(grid))
    with np.errstate(divide="ignore", invalid="ignore"):
        rev = np.where(F > k, (1.0 - k / F) * grid * np.asarray(dist.sf(grid)), -np.inf)
    return float(grid[int(np.argmax(rev))])


def verify_ic_ir(dist: RegularDistribution, k: float, mech: MechanismSolution,
                 n_types: int = 501) -> ICReport:
    """Check truthful reporting and participation on a type grid (cutoff type included)."""
    if n_types < 101:
        raise ParameterError("IC check needs at least 101 types")
    types = np.union1d(np.linspace(dist.v_lo, dist.v_hi, n_types), [mech.cutoff])
    q = float(dist.cdf(mech.cutoff))
    serve = 1.0 if q <= k else k / q
    x = np.where(types >= mech.cutoff, 1.0, 0.0)
    t = np.where(types >= mech.cutoff, mech.price, 0.0)
    # payoff[i, j]: true type types[j] reporting types[i]
    payoff = (x + (1.0 - x) * serve)[:, None] * types[None, :] - t[:, None]
    truthful = np.diag(payoff)
    ic_gap = payoff - truthful[None, :]
    i, j = np.unravel_index(int(np.argmax(ic_gap)), ic_gap.shape)
    ir_gap = types * serve - truthful
    return ICReport(
        max_ic_violation=max(0.0, float(ic_gap[i, j])),
        max_ir_violation=max(0.0, float(ir_gap.max())),
        worst_pair=(float(types[j]), float(types[i])),
    )


def buyer_cutoff(dist: RegularDistribution, k: float, prices) -> np.ndarray:
    """Marginal buyer ``c`` solving ``c (1 - min{1, k/F(c)}) = p`` for each price.

    The left side rises from 0 at ``F^-1(k)`` to ``v_hi (1 - k)``; prices at or
    above that exclude every buyer (``c = v_hi``) and a zero price leaves the
    cutoff at ``F^-1(k)``.
    """
    prices = np.asarray(prices, dtype=float)
    a = float(dist.quantile(k))

    def excess(c):
        F = np.asarray(dist.cdf(c))
        serve = np.where(F <= k, 1.0, k / np.maximum(F, k))
        return c * (1.0 - serve) - prices

    lo = np.full_like(prices, a)
    hi = np.full_like(prices, dist.v_hi)
    c = bisect_array(excess, lo, hi)
    c = np.where(prices >= dist.v_hi * (1.0 - k), dist.v_hi, c)
    return np.where(prices <= 0.0, a, c)


def posted_price_best_response(dist: RegularDistribution, k: float,
                               n_prices: int = 10_001) -> PriceCurve:
    """Revenue-maximizing posted price when buyers best respond to the induced rationing."""
    if n_prices < 1001:
        raise ParameterError("price grid needs at least 1001 points")
    k = check_capacity(k)
    prices = np.linspace(0.0, dist.v_hi, n_prices)
    cutoffs = buyer_cutoff(dist, k, prices)
    revenues = prices * np.asarray(dist.sf(cutoffs))
    return PriceCurve(best_price=float(prices[int(np.argmax(revenues))]),
                      prices=prices, revenues=revenues, cutoffs=cutoffs)


def two_step_dominance_check(dist: RegularDistribution, k: float, cutoff: float,
                             n_trials: int = 1000, seed: int = 0,
                             quality_ratio: float = 1.0, public_price: float = 0.0) -> float:
    """Largest revenue gain of a two-cutoff lottery over the step rule at the same induced demand.

    The randomized rule sells to types above ``v2`` for sure and to types in
    ``[v1, v2)`` with probability ``alpha``, where ``alpha`` keeps the mass
    queueing at the public option equal to ``F(cutoff)``. A non-positive
    return value means no sampled rule beat the step rule.
    """
    if n_trials < 100:
        raise ParameterError("need at least 100 trials")
    rng = np.random.Generator(np.random.Philox(key=seed))
    Q = float(dist.cdf(cutoff))
    m = 1.0 if Q <= k else k / Q
    scale = 1.0 - quality_ratio * m
    public_rev = public_price * m * (1.0 - Q)

    def tail(v):
        return v * np.asarray(dist.sf(v))

    v1 = dist.v_lo + rng.random(n_trials) * (cutoff - dist.v_lo)
    v2 = cutoff + rng.random(n_trials) * (dist.v_hi - cutoff)
    # always include the degenerate lottery, which is the step rule itself
    v1 = np.append(v1, cutoff)
    v2 = np.append(v2, cutoff)
    F1 = np.asarray(dist.cdf(v1))
    F2 = np.asarray(dist.cdf(v2))
    spread = F2 - F1
    alpha = np.where(spread > 0.0, (F2 - Q) / np.where(spread > 0.0, spread, 1.0), 1.0)
    T1, T2 = tail(v1), tail(v2)
    lottery = scale * (T2 + alpha * (T1 - T2)) + public_rev
    step = scale * float(tail(cutoff)) + public_rev
    return float(np.max(lottery - step))


def uniform_stream(seed: int, stream: int, n: int, workers: int | None = None) -> np.ndarray:
    """Uniform draws indexed by buyer: element ``i`` depends only on ``(seed, stream, i)``.

    Built from Philox counter blocks so any chunking reproduces the same array.
    """
    n_chunks = (n + CHUNK - 1) // CHUNK

    def chunk(c):
        start = c * CHUNK
        count = min(CHUNK, n - start)
        bitgen = np.random.Philox(counter=[start // 4, 0, 0, 0], key=[seed, stream])
        return np.random.Generator(bitgen).random(count)

    w = worker_count(workers)
    if w == 1 or n_chunks == 1:
        parts = [chunk(c) for c in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=w) as pool:
            parts = list(pool.map(chunk, range(n_chunks)))
    return np.concatenate(parts) if parts else np.empty(0)


def _equilibrium_buyers(values_desc: np.ndarray, k: float, price: float) -> int:
    """Number of buyers in the empirical market equilibrium.

    Buyers are admitted from the top value down; each admission shrinks the
    queue and raises every queuer's service probability, so the willingness
    to pay of the next candidate, ``v (1 - min{1, k/share})``, only falls.
    Admission stops at the first candidate unwilling to pay ``price``.
    """
    n = values_desc.size
    b = np.arange(1, n + 1)
    share = (n - b) / n
    with np.errstate(divide="ignore"):
        serve = np.where(share > k, k / np.where(share > 0.0, share, 1.0), 1.0)
    wtp = values_desc * (1.0 - serve)
    willing = wtp >= price
    count = int(np.argmin(willing)) if not willing.all() else n
    if willing[count:].any():
        raise ConvergenceError("buyer admission is not monotone; equilibrium not found")
    return count


def simulate_market(dist: RegularDistribution, k: float, price: float,
                    n_buyers: int = 1_000_000, seed: int = 0,
                    workers: int | None = None) -> SimulationResult:
    """Finite-population market with a posted price and a capacity lottery.

    Values are drawn by inverse transform. The buyer set is the equilibrium
    of the empirical market; the public option then gives ``floor(k n)``
    goods to uniformly random queuers (all of them if fewer queue).
    """
    if n_buyers < 1000:
        raise ParameterError("simulation needs at least 1000 buyers")
    k = check_capacity(k)
    n = int(n_buyers)
    values = np.asarray(dist.quantile(uniform_stream(seed, STREAM_VALUES, n, workers)))
    lottery = uniform_stream(seed, STREAM_LOTTERY, n, workers)

    order = np.argsort(-values, kind="stable")
    n_buy = _equilibrium_buyers(values[order], k, price)
    buys = np.zeros(n, dtype=bool)
    buys[order[:n_buy]] = True

    queue = np.flatnonzero(~buys)
    goods = min(queue.size, int(math.floor(k * n)))
    winners = np.zeros(n, dtype=bool)
    if goods:
        ranked = queue[np.argsort(lottery[queue], kind="stable")]
        winners[ranked[:goods]] = True

    surplus = np.where(buys, values - price, np.where(winners, values, 0.0))
    mean_cs = math.fsum(surplus) / n
    var_cs = math.fsum((surplus - mean_cs) ** 2) / (n - 1)
    share = queue.size / n
    served = goods / queue.size if queue.size else 1.0
    buy_frac = n_buy / n
    return SimulationResult(
        n_buyers=n,
        seed=seed,
        realized_demand_share=share,
        realized_rationing_prob=served,
        realized_revenue=price * buy_frac,
        mean_consumer_surplus=mean_cs,
        std_error_cs=math.sqrt(var_cs / n),
        std_error_revenue=price * math.sqrt(buy_frac * (1.0 - buy_frac) / n),
        # delta method through the queue share, whose binomial error drives k / share
        std_error_rationing=(served / share * math.sqrt(share * (1.0 - share) / n)
                             if queue.size and goods < queue.size else 0.0),
        buyers=n_buy,
    )
