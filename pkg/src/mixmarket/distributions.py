"""Value distributions and the functions the pricing problem derives from them.

A distribution lives on a compact support ``[v_lo, v_hi]`` and exposes
vectorized ``cdf``, ``sf`` (= 1 - cdf), ``pdf``, ``pdf_derivative`` and
``quantile``. The module-level functions compute the virtual value, its
slope, the standard monopoly price and the G function

    G(v) = phi(v) F(v) + int_v^vhi phi dF = v - (1 - F(v)) F(v) / f(v),

where the second form uses the tail identity ``int_v^vhi phi dF = v (1 - F(v))``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import ClassVar, Sequence

import numpy as np
from scipy import special

from .errors import DomainError, ParameterError
from .numerics import bisect

DEFAULT_REGULARITY_GRID = 10_001


def _a(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def _scalar_or_array(x: np.ndarray):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class RegularityReport:
    is_regular: bool
    min_phi_slope: float
    failing_points: list = field(default_factory=list)
    grid_size: int = 0


@dataclass(frozen=True)
class RegularDistribution:
    """Base class. Subclasses fill in the ``_cdf``/``_sf``/``_pdf``/``_dpdf``/``_ppf`` kernels.

    Construction runs a grid regularity check; a non-regular distribution can
    still be built and inspected, but the solvers refuse it.
    """

    v_lo: float
    v_hi: float
    family: ClassVar[str] = ""
    regularity: RegularityReport = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "v_lo", float(self.v_lo))
        object.__setattr__(self, "v_hi", float(self.v_hi))
        if not (math.isfinite(self.v_lo) and math.isfinite(self.v_hi)):
            raise ParameterError("support endpoints must be finite")
        if self.v_lo < 0.0:
            raise ParameterError(f"v_lo must be >= 0, got {self.v_lo}")
        if not self.v_hi > self.v_lo:
            raise ParameterError(f"need v_hi > v_lo, got [{self.v_lo}, {self.v_hi}]")
        self._setup()
        object.__setattr__(self, "regularity",
                           check_regularity(self, DEFAULT_REGULARITY_GRID))

    def _setup(self) -> None:
        pass

    # -- public vectorized interface -------------------------------------
    @property
    def width(self) -> float:
        return self.v_hi - self.v_lo

    @property
    def params(self) -> tuple:
        return ()

    @property
    def is_regular(self) -> bool:
        return self.regularity.is_regular

    def cdf(self, v):
        v = np.asarray(v, dtype=float)
        out = np.where(v <= self.v_lo, 0.0,
                       np.where(v >= self.v_hi, 1.0, self._cdf(self._clip(v))))
        return _scalar_or_array(out)

    def sf(self, v):
        v = np.asarray(v, dtype=float)
        out = np.where(v <= self.v_lo, 1.0,
                       np.where(v >= self.v_hi, 0.0, self._sf(self._clip(v))))
        return _scalar_or_array(out)

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        return _scalar_or_array(self._pdf(self._clip(v)))

    def pdf_derivative(self, v):
        v = np.asarray(v, dtype=float)
        return _scalar_or_array(self._dpdf(self._clip(v)))

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u < 0.0) | (u > 1.0)):
            raise DomainError("quantile level must lie in [0, 1]")
        out = np.where(u <= 0.0, self.v_lo,
                       np.where(u >= 1.0, self.v_hi, self._clip(self._ppf(u))))
        return _scalar_or_array(out)

    def describe(self) -> str:
        ps = ", ".join(f"{p:g}" for p in self.params)
        return f"{self.family}({ps})[{self.v_lo:g}, {self.v_hi:g}]"

    def _clip(self, v):
        return np.clip(v, self.v_lo, self.v_hi)

    def _sf(self, v):
        return 1.0 - self._cdf(v)

    def _check_support(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if np.any(np.isnan(v)) or np.any((v < self.v_lo) | (v > self.v_hi)):
            raise DomainError(
                f"value outside support [{self.v_lo}, {self.v_hi}]: {v}")
        return v


@dataclass(frozen=True)
class Uniform(RegularDistribution):
    family: ClassVar[str] = "uniform"

    def _cdf(self, v):
        return (v - self.v_lo) / self.width

    def _sf(self, v):
        return (self.v_hi - v) / self.width

    def _pdf(self, v):
        return np.full_like(v, 1.0 / self.width)

    def _dpdf(self, v):
        return np.zeros_like(v)

    def _ppf(self, u):
        return self.v_lo + u * self.width


@dataclass(frozen=True)
class PiecewiseLinear(RegularDistribution):
    """Density linear between equally spaced knots spanning the support.

    ``heights`` are unnormalized density values at the knots; they are scaled
    to integrate to one. Two knots give a linear density.
    """

    heights: tuple = (1.0, 1.0)
    family: ClassVar[str] = "piecewise_linear"

    def _setup(self):
        h = np.asarray(self.heights, dtype=float)
        if h.ndim != 1 or h.size < 2:
            raise ParameterError("piecewise_linear needs at least two knot heights")
        if np.any(~np.isfinite(h)) or np.any(h <= 0.0):
            raise ParameterError("density heights must be positive and finite")
        knots = np.linspace(self.v_lo, self.v_hi, h.size)
        step = knots[1] - knots[0]
        seg_mass = 0.5 * (h[:-1] + h[1:]) * step
        total = seg_mass.sum()
        h = h / total
        seg_mass = seg_mass / total
        object.__setattr__(self, "_knots", knots)
        object.__setattr__(self, "_step", step)
        object.__setattr__(self, "_d", h)
        object.__setattr__(self, "_slope", np.diff(h) / step)
        object.__setattr__(self, "_F", np.concatenate([[0.0], np.cumsum(seg_mass)]))
        object.__setattr__(self, "_S", np.concatenate([np.cumsum(seg_mass[::-1])[::-1], [0.0]]))

    @property
    def params(self):
        return tuple(self.heights)

    def _seg(self, v):
        j = np.floor((v - self.v_lo) / self._step).astype(int)
        return np.clip(j, 0, len(self._d) - 2)

    def _cdf(self, v):
        j = self._seg(v)
        t = v - self._knots[j]
        return self._F[j] + self._d[j] * t + 0.5 * self._slope[j] * t * t

    def _sf(self, v):
        # mass of [v, knot_{j+1}] plus everything above; avoids 1 - F cancellation
        j = self._seg(v)
        t = self._knots[j + 1] - v
        return self._S[j + 1] + self._d[j + 1] * t - 0.5 * self._slope[j] * t * t

    def _pdf(self, v):
        j = self._seg(v)
        return self._d[j] + self._slope[j] * (v - self._knots[j])

    def _dpdf(self, v):
        return self._slope[self._seg(v)]

    def _ppf(self, u):
        j = np.searchsorted(self._F, u, side="right") - 1
        j = np.clip(j, 0, len(self._d) - 2)
        r = u - self._F[j]
        d, s = self._d[j], self._slope[j]
        # stable root of 0.5 s t^2 + d t - r = 0
        t = 2.0 * r / (d + np.sqrt(np.maximum(d * d + 2.0 * s * r, 0.0)))
        return self._knots[j] + t


@dataclass(frozen=True)
class LinearDensity(PiecewiseLinear):
    """Density proportional to ``alpha + beta * v`` on the support."""

    alpha: float = 1.0
    beta: float = 0.0
    family: ClassVar[str] = "linear_density"

    def __post_init__(self):
        lo_h = self.alpha + self.beta * self.v_lo
        hi_h = self.alpha + self.beta * self.v_hi
        if not (lo_h > 0.0 and hi_h > 0.0):
            raise ParameterError("alpha + beta*v must be positive on the support")
        object.__setattr__(self, "heights", (lo_h, hi_h))
        super().__post_init__()

    @property
    def params(self):
        return (self.alpha, self.beta)


@dataclass(frozen=True)
class Power(RegularDistribution):
    """``F(v) = v**c`` on [0, 1] with ``c >= 1``; the density vanishes at 0 when c > 1."""

    c: float = 2.0
    family: ClassVar[str] = "power"

    def _setup(self):
        if self.v_lo != 0.0 or self.v_hi != 1.0:
            raise ParameterError("power family is defined on support [0, 1]")
        if not self.c >= 1.0:
            raise ParameterError(f"power exponent must be >= 1, got {self.c}")

    @property
    def params(self):
        return (self.c,)

    def _cdf(self, v):
        return v ** self.c

    def _sf(self, v):
        return -np.expm1(self.c * np.log(np.maximum(v, 1e-300)))

    def _pdf(self, v):
        return self.c * v ** (self.c - 1.0)

    def _dpdf(self, v):
        if self.c == 1.0:
            return np.zeros_like(v)
        with np.errstate(divide="ignore"):
            return self.c * (self.c - 1.0) * v ** (self.c - 2.0)

    def _ppf(self, u):
        return u ** (1.0 / self.c)


@dataclass(frozen=True)
class TruncatedExponential(RegularDistribution):
    """Density proportional to ``exp(-rate * (v - v_lo))``; any nonzero rate."""

    rate: float = 1.0
    family: ClassVar[str] = "truncated_exponential"

    def _setup(self):
        if not math.isfinite(self.rate) or self.rate == 0.0:
            raise ParameterError("truncated_exponential rate must be finite and nonzero")
        object.__setattr__(self, "_norm", -math.expm1(-self.rate * self.width))

    @property
    def params(self):
        return (self.rate,)

    def _cdf(self, v):
        return -np.expm1(-self.rate * (v - self.v_lo)) / self._norm

    def _sf(self, v):
        x = v - self.v_lo
        return np.exp(-self.rate * x) * -np.expm1(-self.rate * (self.width - x)) / self._norm

    def _pdf(self, v):
        return self.rate * np.exp(-self.rate * (v - self.v_lo)) / self._norm

    def _dpdf(self, v):
        return -self.rate * self._pdf(v)

    def _ppf(self, u):
        return self.v_lo - np.log1p(-u * self._norm) / self.rate


@dataclass(frozen=True)
class TruncatedNormal(RegularDistribution):
    mu: float = 0.0
    sigma: float = 1.0
    family: ClassVar[str] = "truncated_normal"

    def _setup(self):
        if not self.sigma > 0.0:
            raise ParameterError("truncated_normal sigma must be positive")
        a = (self.v_lo - self.mu) / self.sigma
        b = (self.v_hi - self.mu) / self.sigma
        object.__setattr__(self, "_a", a)
        object.__setattr__(self, "_b", b)
        object.__setattr__(self, "_mass", special.ndtr(b) - special.ndtr(a))

    @property
    def params(self):
        return (self.mu, self.sigma)

    def _z(self, v):
        return (v - self.mu) / self.sigma

    def _cdf(self, v):
        return (special.ndtr(self._z(v)) - special.ndtr(self._a)) / self._mass

    def _sf(self, v):
        return (special.ndtr(-self._z(v)) - special.ndtr(-self._b)) / self._mass

    def _pdf(self, v):
        z = self._z(v)
        return np.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * self.sigma * self._mass)

    def _dpdf(self, v):
        return -self._z(v) / self.sigma * self._pdf(v)

    def _ppf(self, u):
        lower = special.ndtr(self._a)
        return self.mu + self.sigma * special.ndtri(lower + u * self._mass)


FAMILIES = {
    "uniform": 0,
    "linear_density": 2,
    "power": 1,
    "truncated_exponential": 1,
    "truncated_normal": 2,
    "piecewise_linear": None,  # any count >= 2
}


def make_distribution(family: str, support: Sequence[float], params: Sequence[float] = ()):
    """Build a distribution from a family name, support pair and parameter list."""
    lo, hi = (float(x) for x in support)
    params = tuple(float(p) for p in params)
    if family not in FAMILIES:
        raise ParameterError(f"unknown distribution family {family!r}; "
                             f"expected one of {sorted(FAMILIES)}")
    need = FAMILIES[family]
    if need is not None and len(params) != need:
        raise ParameterError(f"{family} takes {need} parameter(s), got {len(params)}")
    if family == "uniform":
        return Uniform(lo, hi)
    if family == "linear_density":
        return LinearDensity(lo, hi, alpha=params[0], beta=params[1])
    if family == "power":
        return Power(lo, hi, c=params[0])
    if family == "truncated_exponential":
        return TruncatedExponential(lo, hi, rate=params[0])
    if family == "truncated_normal":
        return TruncatedNormal(lo, hi, mu=params[0], sigma=params[1])
    return PiecewiseLinear(lo, hi, heights=params)


# -- derived functions ---------------------------------------------------

def virtual_value(dist: RegularDistribution, v):
    """``phi(v) = v - (1 - F(v)) / f(v)``; equals ``v_hi`` at the top of the support."""
    v = dist._check_support(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = v - _a(dist.sf(v)) / _a(dist.pdf(v))
    phi = np.where(v == dist.v_hi, v, phi)
    return _scalar_or_array(phi)


def virtual_value_slope(dist: RegularDistribution, v):
    """``phi'(v) = 2 + (1 - F) f' / f**2``."""
    v = dist._check_support(v)
    f = _a(dist.pdf(v))
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = 2.0 + _a(dist.sf(v)) * _a(dist.pdf_derivative(v)) / (f * f)
    slope = np.where(v == dist.v_hi, 2.0, slope)
    return _scalar_or_array(slope)


def g_function(dist: RegularDistribution, v):
    v = dist._check_support(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = v - _a(dist.sf(v)) * _a(dist.cdf(v)) / _a(dist.pdf(v))
    g = np.where(v == dist.v_lo, dist.v_lo, np.where(v == dist.v_hi, dist.v_hi, g))
    return _scalar_or_array(g)


def g_slope(dist: RegularDistribution, v):
    """``G'(v) = phi'(v) F(v)``, zero at the bottom of the support."""
    v = dist._check_support(v)
    with np.errstate(invalid="ignore"):
        gs = np.asarray(virtual_value_slope(dist, v)) * _a(dist.cdf(v))
    return _scalar_or_array(np.where(v == dist.v_lo, 0.0, gs))


def phi_times_cdf(dist: RegularDistribution, v):
    """``phi(v) F(v)`` written so it stays finite where the density vanishes."""
    v = dist._check_support(v)
    F = _a(dist.cdf(v))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = v * F - _a(dist.sf(v)) * F / _a(dist.pdf(v))
    return _scalar_or_array(np.where(F == 0.0, 0.0, out))


def tail_virtual_surplus(dist: RegularDistribution, v):
    """``int_v^vhi phi dF`` via the closed-form identity ``v (1 - F(v))``."""
    v = dist._check_support(v)
    return _scalar_or_array(v * _a(dist.sf(v)))


@functools.lru_cache(maxsize=256)
def standard_monopoly_price(dist: RegularDistribution) -> float:
    """Smallest value with nonnegative virtual value."""
    if virtual_value(dist, dist.v_lo) >= 0.0:
        return dist.v_lo
    return bisect(lambda v: virtual_value(dist, v), dist.v_lo, dist.v_hi, xtol=1e-12)


def check_regularity(dist: RegularDistribution, grid_size: int = 1001) -> RegularityReport:
    """Evaluate ``phi'`` on a uniform grid and collect the points where it is not positive."""
    if grid_size < 101:
        raise ParameterError("regularity grid needs at least 101 points")
    grid = np.linspace(dist.v_lo, dist.v_hi, grid_size)
    slopes = np.asarray(virtual_value_slope(dist, grid))
    bad = ~(slopes > 0.0)
    return RegularityReport(
        is_regular=not bool(bad.any()),
        min_phi_slope=float(np.nanmin(np.where(np.isnan(slopes), -np.inf, slopes))),
        failing_points=[float(x) for x in grid[bad]],
        grid_size=grid_size,
    )


def hazard_rate(dist: RegularDistribution, v):
    v = dist._check_support(v)
    with np.errstate(divide="ignore"):
        return _scalar_or_array(_a(dist.pdf(v)) / _a(dist.sf(v)))
