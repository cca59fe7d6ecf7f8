"""Core value types and received-power pool construction.

Powers, noise and SINR comparisons are held as :class:`fractions.Fraction`
so that the threshold test is exact: pool levels sit precisely at the SINR
threshold and floating point would make the boundary case flip.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Tuple, Union

Number = Union[int, float, str, Fraction]
Alpha = Union[int, float]

#: Sentinel for an iteration cap that is never reached.
UNBOUNDED: float = math.inf


def as_fraction(value: Number) -> Fraction:
    """Convert ``value`` to an exact rational.

    Floats are read through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    return Fraction(value)


def parse_alpha(value) -> Alpha:
    """Accept a positive int or an unbounded marker (``inf``, ``"inf"``, None)."""
    if value is None:
        return UNBOUNDED
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "unbounded", "∞"):
            return UNBOUNDED
        value = int(text)
    if isinstance(value, float):
        if math.isinf(value) and value > 0:
            return UNBOUNDED
        if not value.is_integer():
            raise ValueError(f"alpha must be an integer, got {value!r}")
        value = int(value)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ValueError(f"alpha must be a positive integer or inf, got {value!r}")
    return value


def format_alpha(alpha: Alpha) -> str:
    return "inf" if math.isinf(alpha) else str(int(alpha))


@dataclass(frozen=True)
class ChannelParams:
    """SINR threshold ``tau`` and noise power ``noise_power`` (watts)."""

    tau: Fraction = Fraction(1)
    noise_power: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "tau", as_fraction(self.tau))
        object.__setattr__(self, "noise_power", as_fraction(self.noise_power))
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.noise_power <= 0:
            raise ValueError(f"noise_power must be positive, got {self.noise_power}")

    def decodable(self, power: Fraction, interference: Fraction) -> bool:
        """SINR test ``power / (interference + N0) >= tau``, evaluated exactly."""
        return power >= self.tau * (interference + self.noise_power)


@dataclass(frozen=True)
class PowerPool:
    """Strictly increasing received power levels, in watts."""

    levels: Tuple[Fraction, ...]

    def __post_init__(self):
        levels = tuple(as_fraction(p) for p in self.levels)
        if not levels:
            raise ValueError("power pool must be non-empty")
        if levels[0] <= 0:
            raise ValueError("power levels must be positive")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"power levels must be strictly increasing: {levels}")
        object.__setattr__(self, "levels", levels)

    def __len__(self) -> int:
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __contains__(self, power) -> bool:
        return as_fraction(power) in self.levels

    def index(self, power) -> int:
        return self.levels.index(as_fraction(power))


def build_power_pool(channel: ChannelParams, l_levels: int) -> PowerPool:
    """Generate ``l_levels`` received power levels.

    Level ``i`` equals ``tau`` times the sum of all weaker levels plus the
    noise power, so a signal at level ``i`` stacked over one signal at every
    weaker level decodes exactly at threshold.

    >>> [str(p) for p in build_power_pool(ChannelParams(1, 1), 3)]
    ['1', '2', '4']
    """
    if isinstance(l_levels, bool) or not isinstance(l_levels, int) or l_levels < 1:
        raise ValueError(f"l_levels must be a positive integer, got {l_levels!r}")
    levels = []
    below = Fraction(0)
    for _ in range(l_levels):
        level = channel.tau * (below + channel.noise_power)
        levels.append(level)
        below += level
    return PowerPool(tuple(levels))


@dataclass(frozen=True)
class SystemConfig:
    """One simulated operating point.

    ``alpha`` is the iteration cap; :data:`UNBOUNDED` lets the decoder run
    until it recovers everyone or runs out of new subtraction hypotheses.
    """

    n_devices: int
    n_rbs: int
    k_repetitions: int
    alpha: Alpha = UNBOUNDED
    channel: ChannelParams = field(default_factory=ChannelParams)
    pool: PowerPool = None
    windows: int = 1
    seed: int = 0

    def __post_init__(self):
        for name in ("n_devices", "n_rbs", "k_repetitions", "windows"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.k_repetitions > self.n_rbs:
            raise ValueError(
                f"k_repetitions ({self.k_repetitions}) cannot exceed n_rbs ({self.n_rbs})"
            )
        object.__setattr__(self, "alpha", parse_alpha(self.alpha))
        if self.pool is None:
            object.__setattr__(self, "pool", build_power_pool(self.channel, 3))
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed!r}")

    @property
    def gamma(self) -> Fraction:
        """User intensity N / R."""
        return Fraction(self.n_devices, self.n_rbs)


@dataclass(frozen=True, order=True)
class DecodedSignal:
    """A recovered device signal, reusable as a known interferer."""

    device_id: int
    power: Fraction

    def __post_init__(self):
        object.__setattr__(self, "power", as_fraction(self.power))
