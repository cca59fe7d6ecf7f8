"""Closed-form replay of the blind IC engine, indexed by lineage.

A hypothesis matrix is fully determined by its lineage (the set of signals
cancelled from the raw matrix), so nothing needs to be materialized:

* With every device tagged by the iteration in which it was first recovered,
  a lineage whose members, sorted by that iteration, are ``d_1 <= ... <= d_m``
  is first built in iteration ``max(1 + m, max_k(d_k + m - k + 1))``.
* Cancelling a device absent from an RB only adds interference there, so an
  RB is best served by a lineage made solely of recovered devices it carries.
  A device is therefore recovered by iteration i iff one of its RBs decodes
  it once some subset of that RB's recovered members, buildable by i, is
  removed.
* Counter totals follow from the number of lineages buildable by the last
  iteration, which is a small dynamic program over the recovery iterations.

:func:`run_engine_fast` returns exactly what :func:`iicdsa.decoder.run_engine`
returns (decoded set, iterations, termination reason and counters).
"""
from __future__ import annotations

from collections import Counter as Multiset
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .decoder import DEFAULT_SAFETY_CAP, EngineOutcome, Termination, _effective_cap
from .framegen import AccessMap
from .metrics import Counters
from .model import Alpha, ChannelParams, parse_alpha


class SicTable:
    """Memoized count of components SIC peels off a stack of powers."""

    def __init__(self, channel: ChannelParams, levels: Sequence[Fraction]):
        self.channel = channel
        self.levels = tuple(levels)
        self._cache: Dict[Tuple[int, ...], int] = {}

    def count(self, stack: Tuple[int, ...]) -> int:
        """``stack`` holds level indices sorted strongest first."""
        hit = self._cache.get(stack)
        if hit is not None:
            return hit
        powers = [self.levels[i] for i in stack]
        rest = sum(powers, Fraction(0))
        c = 0
        for p in powers:
            rest -= p
            if not self.channel.decodable(p, rest):
                break
            c += 1
        self._cache[stack] = c
        return c


def birth_iteration(ranks: Iterable[int]) -> int:
    """Iteration in which the lineage with these member recovery iterations is built."""
    ranks = sorted(ranks)
    m = len(ranks)
    best = 1 + m
    for k, d in enumerate(ranks):
        best = max(best, d + m - k)
    return best


def count_lineages(rank_sizes: Dict[int, int], bound: int) -> int:
    """Number of subsets of the pool built by iteration ``bound``.

    ``rank_sizes[j]`` is the number of pooled signals first recovered in
    iteration j.
    """
    total = sum(rank_sizes.values())
    if total == 0:
        return 1 if bound >= 1 else 0
    if birth_iteration(r for r, c in rank_sizes.items() for _ in range(c)) <= bound:
        return 2**total
    # a subset is built by `bound` iff j + #members recovered at or after j
    # stays <= bound for every recovery iteration j it contains
    ways = {0: 1}
    for j in sorted(rank_sizes, reverse=True):
        c = rank_sizes[j]
        nxt: Dict[int, int] = {}
        for g, w in ways.items():
            for s in range(c + 1):
                g2 = g + s
                if s and j + g2 > bound:
                    break
                nxt[g2] = nxt.get(g2, 0) + w * comb(c, s)
        ways = nxt
    return sum(ways.values())


class RbSolver:
    """Earliest iteration at which each unrecovered member of an RB can be freed.

    Results depend only on the RB's pattern, the (level, recovery iteration)
    of each member in SIC order with 0 for unrecovered members, and are
    cached across calls.
    """

    def __init__(self, table: SicTable):
        self.table = table
        self._cache: Dict[Tuple[Tuple[int, int], ...], Tuple[Tuple[int, int], ...]] = {}

    def solve(self, pattern: Tuple[Tuple[int, int], ...]) -> Tuple[Tuple[int, int], ...]:
        """Pairs ``(position, birth iteration)`` for members that can be freed."""
        hit = self._cache.get(pattern)
        if hit is not None:
            return hit
        count = self.table.count
        open_pos = [k for k, (_, rk) in enumerate(pattern) if not rk]
        best: Dict[int, int] = {}
        if open_pos and count(tuple(pattern[k][0] for k in open_pos)):
            # members sharing (recovery iteration, level) are interchangeable
            # for SIC; cancelling the earliest positions first is never worse
            classes: Dict[Tuple[int, int], List[int]] = {}
            for k, (level, rk) in enumerate(pattern):
                if rk:
                    classes.setdefault((rk, level), []).append(k)
            keys = sorted(classes)
            ranks = [key[0] for key in keys]
            group_start = [ranks.index(rk) for rk in ranks]
            prefix = [[sum(1 << k for k in classes[key][:q]) for q in range(len(classes[key]) + 1)] for key in keys]
            width = len(pattern)
            levels = [level for level, _ in pattern]
            for counts in product(*(range(len(classes[key]) + 1) for key in keys)):
                suffix = [0] * (len(keys) + 1)
                for t in range(len(keys) - 1, -1, -1):
                    suffix[t] = suffix[t + 1] + counts[t]
                if not suffix[0]:
                    continue
                born = 1 + suffix[0]
                removed = 0
                for t, q in enumerate(counts):
                    if q:
                        born = max(born, ranks[t] + suffix[group_start[t]])
                        removed |= prefix[t][q]
                residual = [k for k in range(width) if not removed >> k & 1]
                c = count(tuple(levels[k] for k in residual))
                for k in residual[:c]:
                    if not pattern[k][1] and best.get(k, born + 1) > born:
                        best[k] = born
        result = tuple(sorted(best.items()))
        self._cache[pattern] = result
        return result


@dataclass(frozen=True)
class Trajectory:
    """Recovery iteration of every device the unbounded engine ever recovers."""

    n_devices: int
    n_rbs: int
    recovered_at: Dict[int, int]


def trajectory(
    truth: AccessMap,
    channel: ChannelParams,
    levels: Sequence[Fraction],
    solver: Optional[RbSolver] = None,
) -> Trajectory:
    """Replay recovery iterations until nothing more can ever be decoded.

    Each RB is re-examined only when one of its members is newly recovered.
    For every subset of its recovered members the RB yields the devices SIC
    frees once that subset is cancelled, available from the subset's birth
    iteration on; a device is recovered at the earliest such iteration over
    all its RBs.
    """
    level_of = {p: i for i, p in enumerate(levels)}
    lv = [level_of[p] for p in truth.powers]
    if solver is None:
        solver = RbSolver(SicTable(channel, levels))
    table = solver.table
    members: List[List[int]] = [[] for _ in range(truth.n_rbs)]
    rbs_of: List[Tuple[int, ...]] = [tuple(rbs) for rbs in truth.rb_choices]
    for d, rbs in enumerate(rbs_of):
        for r in rbs:
            members[r].append(d)
    for m in members:
        m.sort(key=lambda d: (-lv[d], d))
    n = truth.n_devices

    rank: Dict[int, int] = {}
    for m in members:
        if m:
            c = table.count(tuple(lv[d] for d in m))
            for d in m[:c]:
                rank.setdefault(d, 1)

    due: Dict[int, int] = {}
    dirty = {r for d in rank for r in rbs_of[d]}
    i = 1
    while len(rank) < n:
        i += 1
        for r in sorted(dirty):
            m = members[r]
            if all(d in rank for d in m):
                continue
            pattern = tuple((lv[d], rank.get(d, 0)) for d in m)
            for pos, born in solver.solve(pattern):
                d = m[pos]
                born = max(born, i)
                if due.get(d, born + 1) > born:
                    due[d] = born
        dirty = set()
        if not due:
            break
        i = max(i, min(due.values()))
        new = [d for d, at in due.items() if at == i]
        for d in new:
            rank[d] = i
            del due[d]
            dirty.update(rbs_of[d])
    return Trajectory(n, truth.n_rbs, rank)


def outcome_for(traj: Trajectory, alpha: Alpha, safety_cap: Optional[int] = DEFAULT_SAFETY_CAP) -> EngineOutcome:
    """Engine outcome for one iteration cap, read off the unbounded trajectory."""
    alpha = parse_alpha(alpha)
    cap, cap_applies = _effective_cap(alpha, safety_cap)
    n, r = traj.n_devices, traj.n_rbs
    by_rank = Multiset(traj.recovered_at.values())
    last_rank = max(by_rank, default=1)

    pooled: Dict[int, int] = {}
    size = 0
    f = None
    reason = None
    i = 0
    while f is None:
        i += 1
        if i in by_rank:
            pooled[i] = by_rank[i]
            size += by_rank[i]
        if size >= n:
            f, reason = i, Termination.ALL_RECOVERED
        elif i >= cap:
            f, reason = i, Termination.ALPHA_REACHED
        elif i >= last_rank:
            # pool is final; lineages keep being built up to its own birth iteration
            full = birth_iteration(d for d, c in pooled.items() for _ in range(c))
            if full <= i:
                f, reason = i, Termination.EXHAUSTED
            elif full < cap:
                f, reason = full, Termination.EXHAUSTED
            else:
                f, reason = int(cap), Termination.ALPHA_REACHED
    f = int(f)

    pool_f = {j: c for j, c in pooled.items() if j <= f}
    decoded = frozenset(d for d, j in traj.recovered_at.items() if j <= f)
    built = count_lineages(pool_f, f)
    pool_before_last = sum(c for j, c in pool_f.items() if j < f)
    if f == 1:
        storage = r
    elif f < cap:
        storage = r * built + pool_before_last
    else:
        storage = r * count_lineages(pool_f, f - 1) + pool_before_last
    counters = Counters(wr_ops=2 * r * (built - 1), dec_ops=r * built, peak_storage=storage)
    return EngineOutcome(
        decoded=decoded,
        iterations_run=f,
        counters=counters,
        terminated_by=reason,
        decoded_at={d: j for d, j in traj.recovered_at.items() if j <= f},
        capped=cap_applies and reason is Termination.ALPHA_REACHED,
    )


def run_engine_fast(
    truth: AccessMap,
    channel: ChannelParams,
    levels: Sequence[Fraction],
    alpha: Alpha,
    *,
    safety_cap: Optional[int] = DEFAULT_SAFETY_CAP,
) -> EngineOutcome:
    return outcome_for(trajectory(truth, channel, levels), alpha, safety_cap)
