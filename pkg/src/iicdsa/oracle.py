"""Brute-force references for small instances.

Nothing here reuses the engine: blind cancellation is applied to the raw
matrix one subset at a time and the residual RBs are decoded with a local
SIC routine, so a bug in either engine shows up as a disagreement.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Dict, FrozenSet, List, Tuple

from .framegen import AccessMap, SignalMatrix, superpose
from .model import ChannelParams, SystemConfig

MAX_ORACLE_DEVICES = 12
MAX_ENUMERATION = 10**7


@dataclass(frozen=True)
class ClosureResult:
    decodable: FrozenSet[int]
    witness: Dict[int, FrozenSet[int]]


def _peel(components: List[Tuple[Fraction, int]], ghost: Fraction, channel: ChannelParams) -> List[int]:
    # components: (power, device_id); returns ids decoded strongest first
    order = sorted(components, key=lambda c: (-c[0], c[1]))
    left = sum(p for p, _ in order) + ghost
    out = []
    for p, d in order:
        left -= p
        if p < channel.tau * (left + channel.noise_power):
            break
        out.append(d)
    return out


def _scan(
    m0: SignalMatrix, removed: FrozenSet[int], power: Dict[int, Fraction], channel: ChannelParams
) -> set:
    found = set()
    for rb in m0.rbs:
        present = {s.device_id for s in rb.real}
        ghost = sum(rb.ghosts, Fraction(0)) + sum(
            (power[d] for d in removed if d not in present), Fraction(0)
        )
        comps = [(s.power, s.device_id) for s in rb.real if s.device_id not in removed]
        found.update(_peel(comps, ghost, channel))
    return found


def closure_decode(m0: SignalMatrix, channel: ChannelParams) -> ClosureResult:
    """Every device recoverable by cancelling some subset of recoverable devices.

    Starts from a plain scan of ``m0`` and keeps trying every subset of the
    devices found so far as a blind cancellation set until nothing new turns up.
    """
    power: Dict[int, Fraction] = {}
    for rb in m0.rbs:
        for s in rb.real:
            power[s.device_id] = s.power
    if len(power) > MAX_ORACLE_DEVICES:
        raise ValueError(f"closure_decode is limited to {MAX_ORACLE_DEVICES} devices, got {len(power)}")

    witness: Dict[int, FrozenSet[int]] = {d: frozenset() for d in _scan(m0, frozenset(), power, channel)}
    tried = {frozenset()}
    grew = True
    while grew:
        grew = False
        known = sorted(witness)
        for size in range(1, len(known) + 1):
            for subset in combinations(known, size):
                removed = frozenset(subset)
                if removed in tried:
                    continue
                tried.add(removed)
                for d in _scan(m0, removed, power, channel):
                    if d not in witness:
                        witness[d] = removed
                        grew = True
    return ClosureResult(frozenset(witness), witness)


def enumeration_size(config: SystemConfig) -> int:
    per_device = comb(config.n_rbs, config.k_repetitions) * len(config.pool)
    return per_device**config.n_devices


def iter_access_maps(config: SystemConfig):
    """Every access map for ``config``, each equally likely under uniform draws."""
    choices = [
        (rbs, p)
        for rbs in combinations(range(config.n_rbs), config.k_repetitions)
        for p in config.pool.levels
    ]
    for combo in product(choices, repeat=config.n_devices):
        yield AccessMap(config.n_rbs, tuple(c[0] for c in combo), tuple(c[1] for c in combo))


def exact_access_probability(config: SystemConfig) -> Fraction:
    """Expected fraction of devices recovered with no iteration cap, by enumeration."""
    size = enumeration_size(config)
    if size > MAX_ENUMERATION:
        raise ValueError(f"enumeration space {size} exceeds {MAX_ENUMERATION}")
    if config.n_devices > MAX_ORACLE_DEVICES:
        raise ValueError(f"exact_access_probability is limited to {MAX_ORACLE_DEVICES} devices")
    total = 0
    for amap in iter_access_maps(config):
        total += len(closure_decode(superpose(amap), config.channel).decodable)
    return Fraction(total, size * config.n_devices)
