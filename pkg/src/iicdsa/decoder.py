"""Blind iterative interference cancellation over materialized signal matrices.

Each iteration cancels already-recovered device signals from every RB of a
hypothesis matrix (the receiver does not know where the other replicas
landed) and re-runs per-RB SIC on the results. A cancelled signal that the
RB never carried leaves a *ghost*: residual interference of the same power
that never passes the integrity check.

This module is the reference implementation. :mod:`iicdsa.lineage` computes
the same outcomes without building the matrices.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .framegen import AccessMap, RbSignal, SignalMatrix
from .metrics import Counters
from .model import Alpha, ChannelParams, DecodedSignal, SystemConfig, parse_alpha

DEFAULT_SAFETY_CAP = 64


class Termination(str, enum.Enum):
    ALPHA_REACHED = "AlphaReached"
    ALL_RECOVERED = "AllRecovered"
    EXHAUSTED = "Exhausted"


class DoubleSubtraction(ValueError):
    """A signal was cancelled twice along one lineage (engine logic error)."""


def sic_decode_rb(rb: RbSignal, channel: ChannelParams) -> Tuple[List[DecodedSignal], RbSignal]:
    """Strongest-first SIC on one RB.

    Returns the signals decoded, in order, and the residual RB. Ghosts are
    never decoded. Equal powers are taken in ascending device id order, which
    only matters when ``tau < 1``.
    """
    remaining = sorted(rb.real, key=lambda s: (-s.power, s.device_id))
    interference = sum((s.power for s in remaining), Fraction(0)) + sum(rb.ghosts, Fraction(0))
    decoded = []
    for s in remaining:
        interference -= s.power
        if not channel.decodable(s.power, interference):
            break
        decoded.append(s)
    residual = RbSignal(real=tuple(remaining[len(decoded):]), ghosts=rb.ghosts)
    return decoded, residual


def dec_crc(
    matrix: SignalMatrix,
    channel: ChannelParams,
    truth: AccessMap,
    counters: Optional[Counters] = None,
) -> Set[DecodedSignal]:
    """Decode every RB of ``matrix`` and keep the signals that pass CRC.

    CRC is modelled as a ground-truth check: the device exists and was sent at
    that power.
    """
    found: Dict[int, DecodedSignal] = {}
    for rb in matrix.rbs:
        decoded, _ = sic_decode_rb(rb, channel)
        for s in decoded:
            if _crc_ok(s, truth):
                found.setdefault(s.device_id, s)
    if counters is not None:
        counters.dec_ops += matrix.n_rbs
    return set(found.values())


def _crc_ok(signal: DecodedSignal, truth: AccessMap) -> bool:
    return 0 <= signal.device_id < truth.n_devices and truth.powers[signal.device_id] == signal.power


def ic(
    matrix: SignalMatrix,
    mai: DecodedSignal,
    iteration: int,
    counters: Optional[Counters] = None,
) -> SignalMatrix:
    """Cancel ``mai`` from every RB of ``matrix``.

    Where the RB carries that device the component is removed (perfect CSI);
    elsewhere a ghost of the same power is left behind.
    """
    if mai.device_id in matrix.lineage:
        raise DoubleSubtraction(
            f"device {mai.device_id} already cancelled along lineage {sorted(matrix.lineage)}"
        )
    rbs = []
    for rb in matrix.rbs:
        kept = tuple(s for s in rb.real if s.device_id != mai.device_id)
        if len(kept) == len(rb.real):
            rbs.append(RbSignal(real=rb.real, ghosts=tuple(sorted(rb.ghosts + (mai.power,)))))
        else:
            rbs.append(RbSignal(real=kept, ghosts=rb.ghosts))
    if counters is not None:
        counters.wr_ops += 2 * matrix.n_rbs
    return SignalMatrix(
        rbs=tuple(rbs),
        lineage=matrix.lineage | {mai.device_id},
        born_iteration=iteration,
    )


@dataclass
class EngineOutcome:
    decoded: FrozenSet[int]
    iterations_run: int
    counters: Counters
    terminated_by: Termination
    decoded_at: Dict[int, int] = field(default_factory=dict)
    capped: bool = False
    budget_hit: bool = False
    trace: Optional[List[dict]] = None


def trace_jsonl(outcome: EngineOutcome) -> str:
    """Per-iteration trace records as JSON lines."""
    if outcome.trace is None:
        raise ValueError("outcome was produced without trace=True")
    return "".join(json.dumps(rec, separators=(",", ":")) + "\n" for rec in outcome.trace)


def _effective_cap(alpha: Alpha, safety_cap: Optional[int]) -> Tuple[float, bool]:
    if math.isinf(alpha) and safety_cap is not None:
        return float(safety_cap), True
    return alpha, False


def run_engine(
    m0: SignalMatrix,
    config: SystemConfig,
    truth: AccessMap,
    alpha: Optional[Alpha] = None,
    *,
    safety_cap: Optional[int] = DEFAULT_SAFETY_CAP,
    max_cells: Optional[int] = None,
    trace: bool = False,
) -> EngineOutcome:
    """Run blind iterative IC on the raw matrix ``m0``.

    Iteration 1 scans ``m0``. Iteration i >= 2 derives new matrices by
    cancelling one recovered signal from

    * every matrix born in iteration i-1, using any recovered signal, and
    * every older matrix, using the signals first recovered in iteration i-1,

    skipping any lineage already built. Decoding stops when the iteration cap
    is hit, every device is recovered, or no new lineage can be formed.

    ``alpha`` overrides ``config.alpha``. ``safety_cap`` bounds an unbounded
    cap; ``max_cells`` bounds the buffered RB cells (exceeding it ends the
    window as exhausted with ``budget_hit`` set).
    """
    if m0.lineage:
        raise ValueError("run_engine expects the raw matrix (empty lineage)")
    alpha = parse_alpha(config.alpha if alpha is None else alpha)
    cap, cap_applies = _effective_cap(alpha, safety_cap)
    channel = config.channel
    r = m0.n_rbs
    n = truth.n_devices
    counters = Counters()
    records: Optional[List[dict]] = [] if trace else None

    pool: Dict[int, DecodedSignal] = {}
    decoded_at: Dict[int, int] = {}
    matrices: Dict[FrozenSet[int], SignalMatrix] = {}

    # iteration 1
    root = m0
    matrices[root.lineage] = root
    new = dec_crc(root, channel, truth, counters)
    for s in sorted(new):
        pool[s.device_id] = s
        decoded_at[s.device_id] = 1
    counters.peak_storage = r
    if records is not None:
        records.append(_record(1, 1, new, len(pool)))
    frontier = [root]
    last_new = sorted(s.device_id for s in new)
    iteration = 1
    budget_hit = False
    reason = _stop_reason(pool, n, iteration, cap)

    while reason is None:
        iteration += 1
        existing_before = len(matrices)
        pool_before = len(pool)
        candidates: Dict[FrozenSet[int], Tuple[SignalMatrix, DecodedSignal]] = {}
        frontier_ids = {id(m) for m in frontier}
        for parent in frontier:
            for d in sorted(pool):
                _offer(candidates, matrices, parent, pool[d])
        for parent in list(matrices.values()):
            if id(parent) in frontier_ids:
                continue
            for d in last_new:
                _offer(candidates, matrices, parent, pool[d])
        if not candidates:
            iteration -= 1
            reason = Termination.EXHAUSTED
            break

        retain = iteration < cap
        found: Dict[int, DecodedSignal] = {}
        born = []
        for lineage in sorted(candidates, key=lambda s: (len(s), sorted(s))):
            if max_cells is not None and retain and r * (len(matrices) + 1) > max_cells:
                budget_hit = True
                break
            parent, signal = candidates[lineage]
            child = ic(parent, signal, iteration, counters)
            for s in dec_crc(child, channel, truth, counters):
                if s.device_id not in pool:
                    found.setdefault(s.device_id, s)
            born.append(child)
            matrices[child.lineage] = child
        buffered = len(matrices) if retain else existing_before
        counters.peak_storage = max(counters.peak_storage, r * buffered + pool_before)
        for d in sorted(found):
            pool[d] = found[d]
            decoded_at[d] = iteration
        if records is not None:
            records.append(_record(iteration, len(born), found.values(), len(pool)))
        frontier = born
        last_new = sorted(found)
        if budget_hit:
            reason = Termination.EXHAUSTED
            break
        reason = _stop_reason(pool, n, iteration, cap)

    return EngineOutcome(
        decoded=frozenset(pool),
        iterations_run=iteration,
        counters=counters,
        terminated_by=reason,
        decoded_at=decoded_at,
        capped=cap_applies and reason is Termination.ALPHA_REACHED,
        budget_hit=budget_hit,
        trace=records,
    )


def _offer(candidates, matrices, parent: SignalMatrix, signal: DecodedSignal) -> None:
    if signal.device_id in parent.lineage:
        return
    lineage = parent.lineage | {signal.device_id}
    if lineage in matrices or lineage in candidates:
        return
    candidates[lineage] = (parent, signal)


def _stop_reason(pool, n: int, iteration: int, cap: float) -> Optional[Termination]:
    if len(pool) >= n:
        return Termination.ALL_RECOVERED
    if iteration >= cap:
        return Termination.ALPHA_REACHED
    return None


def _record(iteration: int, new_matrices: int, new_signals, pool_size: int) -> dict:
    return {
        "iter": iteration,
        "new_matrices": new_matrices,
        "new_decoded": sorted(s.device_id for s in new_signals),
        "pool_size": pool_size,
    }
