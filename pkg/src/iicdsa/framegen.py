"""Random access maps and their superposition into the raw received matrix."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

import numpy as np

from .model import DecodedSignal, SystemConfig, as_fraction


def window_rng(seed: int, *key: int) -> np.random.Generator:
    """PCG64 stream for one window.

    The stream depends only on ``seed`` and ``key`` (e.g. ``(n, r, k, window)``),
    never on how many windows ran before it, so windows can be generated in
    any order or in parallel.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class AccessMap:
    """Ground-truth replica placement for one frame.

    ``rb_choices[d]`` is the sorted tuple of RB indices used by device ``d``;
    ``powers[d]`` is the received power shared by all of its replicas.
    """

    n_rbs: int
    rb_choices: Tuple[Tuple[int, ...], ...]
    powers: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.rb_choices) != len(self.powers):
            raise ValueError("rb_choices and powers must have one entry per device")
        choices = []
        for d, rbs in enumerate(self.rb_choices):
            rbs = tuple(sorted(int(r) for r in rbs))
            if len(set(rbs)) != len(rbs):
                raise ValueError(f"device {d} uses an RB twice: {rbs}")
            if rbs and (rbs[0] < 0 or rbs[-1] >= self.n_rbs):
                raise ValueError(f"device {d} RB index out of range: {rbs}")
            choices.append(rbs)
        object.__setattr__(self, "rb_choices", tuple(choices))
        object.__setattr__(self, "powers", tuple(as_fraction(p) for p in self.powers))
        if any(p <= 0 for p in self.powers):
            raise ValueError("powers must be positive")

    @property
    def n_devices(self) -> int:
        return len(self.powers)

    def signal(self, device_id: int) -> DecodedSignal:
        return DecodedSignal(device_id, self.powers[device_id])

    def rb_members(self) -> Tuple[Tuple[int, ...], ...]:
        """Device ids present in each RB, ascending."""
        members = [[] for _ in range(self.n_rbs)]
        for d, rbs in enumerate(self.rb_choices):
            for r in rbs:
                members[r].append(d)
        return tuple(tuple(m) for m in members)

    def exclusive_devices(self) -> FrozenSet[int]:
        return frozenset(m[0] for m in self.rb_members() if len(m) == 1)

    def to_json(self) -> str:
        devices = [
            {"id": d, "rbs": list(rbs), "power": _power_to_json(p)}
            for d, (rbs, p) in enumerate(zip(self.rb_choices, self.powers))
        ]
        return json.dumps({"n_rbs": self.n_rbs, "devices": devices}, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str, n_rbs: Optional[int] = None) -> "AccessMap":
        data = json.loads(text)
        devices = sorted(data["devices"], key=lambda e: e["id"])
        if [e["id"] for e in devices] != list(range(len(devices))):
            raise ValueError("device ids must be 0..N-1")
        if n_rbs is None:
            n_rbs = data.get("n_rbs")
        if n_rbs is None:
            n_rbs = 1 + max((r for e in devices for r in e["rbs"]), default=-1)
        return cls(
            n_rbs=int(n_rbs),
            rb_choices=tuple(tuple(e["rbs"]) for e in devices),
            powers=tuple(as_fraction(e["power"]) for e in devices),
        )


def _power_to_json(p: Fraction):
    return p.numerator if p.denominator == 1 else str(p)


def generate_access_map(
    config: SystemConfig,
    rng: np.random.Generator,
    power_probs: Optional[Sequence[float]] = None,
) -> AccessMap:
    """Draw K distinct RBs and one power level per device.

    RB subsets are uniform without replacement; the power level is uniform over
    the pool unless ``power_probs`` gives explicit weights.
    """
    n, r, k = config.n_devices, config.n_rbs, config.k_repetitions
    levels = config.pool.levels
    # the k smallest of n iid uniforms per row form a uniform random k-subset
    keys = rng.random((n, r))
    if k == r:
        rbs = np.broadcast_to(np.arange(r), (n, r))
    else:
        rbs = np.sort(np.argpartition(keys, k - 1, axis=1)[:, :k], axis=1)
    if power_probs is None:
        idx = rng.integers(0, len(levels), size=n)
    else:
        if len(power_probs) != len(levels):
            raise ValueError("power_probs must have one weight per pool level")
        idx = rng.choice(len(levels), size=n, p=np.asarray(power_probs, dtype=float))
    return AccessMap(
        n_rbs=r,
        rb_choices=tuple(map(tuple, rbs.tolist())),
        powers=tuple(levels[i] for i in idx.tolist()),
    )


@dataclass(frozen=True)
class RbSignal:
    """Residual content of one RB.

    ``real`` holds the device signals still present; ``ghosts`` holds powers
    left behind by subtracting a signal the RB never carried.
    """

    real: Tuple[DecodedSignal, ...] = ()
    ghosts: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        ids = [s.device_id for s in self.real]
        if len(set(ids)) != len(ids):
            raise ValueError(f"device repeated within one RB: {ids}")
        if any(s.power <= 0 for s in self.real) or any(g <= 0 for g in self.ghosts):
            raise ValueError("component powers must be positive")

    def device_ids(self) -> FrozenSet[int]:
        return frozenset(s.device_id for s in self.real)

    def total_power(self) -> Fraction:
        return sum((s.power for s in self.real), Fraction(0)) + sum(self.ghosts, Fraction(0))


@dataclass(frozen=True)
class SignalMatrix:
    """One hypothesis of the received frame.

    ``lineage`` is the set of device signals blindly subtracted from the raw
    matrix to reach this one; it is the matrix's identity for deduplication.
    """

    rbs: Tuple[RbSignal, ...]
    lineage: FrozenSet[int] = frozenset()
    born_iteration: int = 0

    @property
    def n_rbs(self) -> int:
        return len(self.rbs)


def superpose(access_map: AccessMap, config: Optional[SystemConfig] = None) -> SignalMatrix:
    """Build the raw received matrix (empty lineage, born in iteration 0)."""
    if config is not None:
        if config.n_rbs != access_map.n_rbs or config.n_devices != access_map.n_devices:
            raise ValueError("access map does not match config dimensions")
        if any(p not in config.pool for p in access_map.powers):
            raise ValueError("access map uses a power outside the pool")
    cells = [[] for _ in range(access_map.n_rbs)]
    for d, (rbs, p) in enumerate(zip(access_map.rb_choices, access_map.powers)):
        for r in rbs:
            cells[r].append(DecodedSignal(d, p))
    return SignalMatrix(rbs=tuple(RbSignal(real=tuple(c)) for c in cells))


def access_map_from_rbs(
    n_rbs: int, placements: Iterable[Iterable[int]], powers: Iterable
) -> AccessMap:
    """Convenience constructor for hand-built fixtures."""
    return AccessMap(n_rbs, tuple(tuple(p) for p in placements), tuple(powers))
