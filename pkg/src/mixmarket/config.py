"""Line-oriented market configuration files.

One ``key = value`` per line, ``#`` starts a comment. Example::

    distribution = uniform
    support = 0 1
    capacity = 0.5

Required keys are ``distribution``, ``support`` and ``capacity``; everything
else has a default. Unknown or repeated keys are errors.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any

from .distributions import FAMILIES, RegularDistribution, make_distribution
from .errors import MixMarketError, ParameterError
from .solver import MarketParams

EXIT_CONFIG = 2
EXIT_IRREGULAR = 3


class ConfigError(MixMarketError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None,
                 exit_code: int = EXIT_CONFIG):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key
        self.exit_code = exit_code


@dataclass(frozen=True)
class MarketConfig:
    distribution: str
    support: tuple
    capacity: float
    params: tuple = ()
    quality_ratio: float = 1.0
    public_price: float = 0.0
    timing: str = "substitute"
    k_min: float = 1e-4
    k_max: float = 0.9999
    k_steps: int = 199
    type_grid: int = 201
    seed: int = 0
    buyers: int = 1_000_000
    out_dir: str = "."
    xtol: float = 1e-12
    grid_size: int = 10_001

    def build_distribution(self) -> RegularDistribution:
        return make_distribution(self.distribution, self.support, self.params)

    def market_params(self) -> MarketParams:
        return MarketParams(self.capacity, self.quality_ratio, self.public_price, self.timing)


def _reals(n: int | None):
    def conv(text: str) -> tuple:
        parts = text.split()
        if n is not None and len(parts) != n:
            raise ValueError(f"expected {n} number(s), got {len(parts)}")
        return tuple(float(p) for p in parts)
    return conv


def _word(text: str) -> str:
    if len(text.split()) != 1:
        raise ValueError("expected a single word")
    return text.strip()


def _path(text: str) -> str:
    if not text.strip():
        raise ValueError("expected a path")
    return text.strip()


_CONVERTERS = {
    "distribution": _word,
    "support": _reals(2),
    "params": _reals(None),
    "capacity": float,
    "quality_ratio": float,
    "public_price": float,
    "timing": _word,
    "k_min": float,
    "k_max": float,
    "k_steps": int,
    "type_grid": int,
    "seed": int,
    "buyers": int,
    "out_dir": _path,
    "xtol": float,
    "grid_size": int,
}
REQUIRED = ("distribution", "support", "capacity")


def _field_checks(values: dict[str, Any]):
    """Yield ``(key, message)`` for every single-key or cross-key violation."""
    if "distribution" in values and values["distribution"] not in FAMILIES:
        yield "distribution", f"unknown family; expected one of {sorted(FAMILIES)}"
    if "support" in values:
        lo, hi = values["support"]
        if not (0.0 <= lo < hi):
            yield "support", "need 0 <= v_lo < v_hi"
    if "capacity" in values and not 0.0 < values["capacity"] < 1.0:
        yield "capacity", "must lie in the open interval (0, 1)"
    if "quality_ratio" in values and not 0.0 < values["quality_ratio"] <= 1.0:
        yield "quality_ratio", "must lie in (0, 1]"
    if "public_price" in values and not values["public_price"] >= 0.0:
        yield "public_price", "must be >= 0"
    if "timing" in values and values["timing"] not in ("substitute", "complement"):
        yield "timing", "must be 'substitute' or 'complement'"
    for key in ("k_min", "k_max"):
        if key in values and not 0.0 < values[key] < 1.0:
            yield key, "must lie in the open interval (0, 1)"
    if "k_min" in values and "k_max" in values and not values["k_min"] < values["k_max"]:
        yield "k_max", "must exceed k_min"
    if "k_steps" in values and values["k_steps"] < 2:
        yield "k_steps", "need at least 2 steps"
    if "type_grid" in values and values["type_grid"] < 2:
        yield "type_grid", "need at least 2 types"
    if "buyers" in values and values["buyers"] < 1000:
        yield "buyers", "need at least 1000 buyers"
    if "seed" in values and values["seed"] < 0:
        yield "seed", "must be >= 0"
    if "xtol" in values and not values["xtol"] >= 0.0:
        yield "xtol", "must be >= 0"
    if "grid_size" in values and values["grid_size"] < 1001:
        yield "grid_size", "need at least 1001 points"
    if "public_price" in values:
        theta = values.get("quality_ratio", 1.0)
        v_lo = values["support"][0] if "support" in values else None
        if v_lo is not None and values["public_price"] > theta * v_lo:
            yield "public_price", (
                f"public_price {values['public_price']:g} exceeds quality_ratio * v_lo = "
                f"{theta * v_lo:g}; the model assumes no type is priced out of the public option")


def parse_config(text: str, check_regular: bool = True) -> MarketConfig:
    """Parse and fully validate a configuration.

    Raises ``ConfigError`` carrying the offending line and key; its
    ``exit_code`` is 2 for malformed input and 3 when the distribution is
    not regular.
    """
    values: dict[str, Any] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, value = (s.strip() for s in body.partition("="))
        if key not in _CONVERTERS:
            raise ConfigError("unknown key", line=lineno, key=key)
        if key in values:
            raise ConfigError(f"repeated key (first set on line {lines[key]})", line=lineno, key=key)
        try:
            values[key] = _CONVERTERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value {value!r}: {exc}", line=lineno, key=key) from None
        lines[key] = lineno

    for key, message in _field_checks(values):
        raise ConfigError(message, line=lines.get(key), key=key)
    for key in REQUIRED:
        if key not in values:
            raise ConfigError("missing required key", key=key)

    config = MarketConfig(**values)
    try:
        dist = config.build_distribution()
    except ParameterError as exc:
        key = "params" if "params" in lines else "distribution"
        raise ConfigError(str(exc), line=lines.get(key), key=key) from None
    if check_regular and not dist.is_regular:
        raise ConfigError(
            f"{dist.describe()} is not regular (min virtual value slope "
            f"{dist.regularity.min_phi_slope:.4g})",
            line=lines["distribution"], key="distribution", exit_code=EXIT_IRREGULAR)
    return config


def serialize_config(config: MarketConfig) -> str:
    out = []
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            if not value:
                continue
            text = " ".join(repr(float(x)) for x in value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        out.append(f"{f.name} = {text}")
    return "\n".join(out) + "\n"
