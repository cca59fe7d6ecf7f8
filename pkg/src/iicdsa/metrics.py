"""Complexity counters, access-probability statistics and worst-case bounds.

Counter units:

* one write-read op is one RB cell read or written while cancelling,
* one decode op is one per-RB SIC pass,
* one storage item is one buffered RB cell or one buffered MAI signal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from statistics import NormalDist
from typing import Dict, Iterable, NamedTuple, Tuple


@dataclass
class Counters:
    wr_ops: int = 0
    dec_ops: int = 0
    peak_storage: int = 0

    def __add__(self, other: "Counters") -> "Counters":
        return Counters(
            self.wr_ops + other.wr_ops,
            self.dec_ops + other.dec_ops,
            self.peak_storage + other.peak_storage,
        )

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.wr_ops, self.dec_ops, self.peak_storage)


class ComplexityBound(NamedTuple):
    wr: int
    dec: int
    sto: int

    def covers(self, counters: Counters) -> bool:
        return (
            counters.wr_ops <= self.wr
            and counters.dec_ops <= self.dec
            and counters.peak_storage <= self.sto
        )

    def max(self, other: "ComplexityBound") -> "ComplexityBound":
        return ComplexityBound(*(max(a, b) for a, b in zip(self, other)))


def bound_alpha2(n: int, r: int) -> ComplexityBound:
    """Worst case for a two-iteration decoder.

    Iteration 1 scans the raw matrix and recovers at most N-1 devices (N would
    end decoding); iteration 2 derives one matrix per recovered device. Only
    the raw matrix and the MAI signals stay buffered.
    """
    if n < 1 or r < 1:
        raise ValueError("n and r must be positive")
    branches = n - 1
    return ComplexityBound(wr=2 * branches * r, dec=branches * r + r, sto=r + branches)


def bound_general(alpha: int, n: int, r: int) -> ComplexityBound:
    """Worst case for a finite iteration cap with ``n >= 2*alpha + 2``.

    The buffered MAI pool never exceeds N-1 signals while decoding continues,
    and a matrix born in iteration i has subtracted at most i-1 of them, so at
    most ``sum(C(N-1, j) for j < alpha)`` matrices are ever built. Matrices of
    the last iteration are scanned and dropped, never buffered.

    Reduces to :func:`bound_alpha2` at ``alpha == 2``.
    """
    if isinstance(alpha, float) or alpha < 1:
        raise ValueError(f"alpha must be a finite positive integer, got {alpha!r}")
    if n < 2 * alpha + 2:
        raise ValueError(f"bound_general needs n >= 2*alpha + 2, got n={n}, alpha={alpha}")
    if alpha == 1:
        # one scan of the raw matrix; every decoded signal counted as buffered
        return ComplexityBound(wr=0, dec=r, sto=r + n)
    pool = n - 1
    built = sum(comb(pool, j) for j in range(alpha))
    buffered = max(1, sum(comb(pool, j) for j in range(alpha - 1)))
    return ComplexityBound(wr=2 * r * (built - 1), dec=r * built, sto=r * buffered + pool)


def paper_general_storage(alpha: int, n: int, r: int) -> int:
    """Storage items from the textbook summation with N-2 exclusive devices.

    ``R * sum(C(N-2, b-1) for b in 1..alpha-1) + N``. Kept for reference; it
    assumes N-2 recovered devices, which undercounts windows that stall at
    N-1, so counters are checked against :func:`bound_general` instead.
    """
    return r * sum(comb(n - 2, b - 1) for b in range(1, alpha)) + n


@dataclass(frozen=True)
class WorstCaseProfile:
    name: str
    matrices_per_iteration: Tuple[int, ...]
    buffered_matrices: int
    mai: int
    bound: ComplexityBound


def alphaN_profiles(n: int, r: int) -> Dict[str, WorstCaseProfile]:
    """The two unbounded-iteration worst cases.

    ``storage_worst``: one exclusive device per iteration, doubling the
    matrices each time, N-1 iterations. ``iteration_worst``: N-2 devices up
    front, then C(N-2, i-1) matrices per iteration for N-2 iterations.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    # storage-worst: iteration i >= 2 generates 2^(i-1) matrices
    per_iter = (1,) + tuple(2 ** (i - 1) for i in range(2, n))
    generated = sum(per_iter[1:])
    storage = WorstCaseProfile(
        name="storage_worst",
        matrices_per_iteration=per_iter,
        buffered_matrices=2 ** (n - 2),
        mai=n - 1,
        bound=ComplexityBound(
            wr=2 * r * generated,
            dec=r * (1 + generated),
            sto=r * 2 ** (n - 2) + (n - 1),
        ),
    )
    # iteration-worst: N-2 iterations, C(N-2, i-1) matrices in iteration i
    per_iter = (1,) + tuple(comb(n - 2, i - 1) for i in range(2, n - 1))
    generated = sum(per_iter[1:])
    iteration = WorstCaseProfile(
        name="iteration_worst",
        matrices_per_iteration=per_iter,
        buffered_matrices=sum(per_iter),
        mai=n - 2,
        bound=ComplexityBound(
            wr=2 * r * generated,
            dec=r * (1 + generated),
            sto=r * sum(per_iter) + (n - 2),
        ),
    )
    return {p.name: p for p in (storage, iteration)}


def bound_alphaN(n: int, r: int) -> ComplexityBound:
    """Envelope for an unbounded iteration cap.

    Element-wise max of the two textbook profiles and the full-pool case
    (N-1 recovered devices, every subset of them subtracted), which the
    textbook profiles leave out.
    """
    if n < 1 or r < 1:
        raise ValueError("n and r must be positive")
    if n == 1:
        return ComplexityBound(0, r, r)
    full = 2 ** (n - 1)
    envelope = ComplexityBound(wr=2 * r * (full - 1), dec=r * full, sto=r * full + n - 1)
    for profile in alphaN_profiles(n, r).values():
        envelope = envelope.max(profile.bound)
    return envelope


def bound_for(alpha, n: int, r: int):
    """The bound for the regime ``alpha`` falls into, or None if no regime applies."""
    if math.isinf(alpha) or alpha >= n:
        return bound_alphaN(n, r)
    if alpha <= 2:
        return bound_alpha2(n, r)
    if n >= 2 * alpha + 2:
        return bound_general(alpha, n, r)
    return None


# --- access probability -------------------------------------------------------

_Z95 = NormalDist().inv_cdf(0.975)


@dataclass(frozen=True)
class AccessStat:
    """Mean fraction of devices recovered per window.

    ``ci95_halfwidth`` is the binomial normal approximation over all
    device-level trials. ``se_window`` is the standard error computed from the
    per-window fractions, which accounts for devices in one window being
    correlated; use it for significance tests.
    """

    mean_access_prob: float
    ci95_halfwidth: float
    windows: int
    trials: int = 0
    se_window: float = 0.0


def access_stat(fraction_sum: float, fraction_sq_sum: float, windows: int, n: int) -> AccessStat:
    """Build an :class:`AccessStat` from running sums of per-window fractions."""
    if windows < 1:
        raise ValueError("need at least one window")
    mean = fraction_sum / windows
    mean = min(1.0, max(0.0, mean))
    trials = windows * n
    ci = _Z95 * math.sqrt(mean * (1 - mean) / trials)
    if windows > 1:
        var = max(0.0, (fraction_sq_sum - windows * mean * mean) / (windows - 1))
        se = math.sqrt(var / windows)
    else:
        se = 0.0
    return AccessStat(mean, ci, windows, trials, se)


def estimate_access(outcomes: Iterable, n: int) -> AccessStat:
    """Mean access probability over engine outcomes for an N-device system."""
    if n < 1:
        raise ValueError("n must be positive")
    total = total_sq = 0.0
    windows = 0
    for outcome in outcomes:
        frac = len(outcome.decoded) / n
        total += frac
        total_sq += frac * frac
        windows += 1
    if windows == 0:
        raise ValueError("estimate_access needs at least one outcome")
    return access_stat(total, total_sq, windows, n)


def z_difference(a: AccessStat, b: AccessStat) -> float:
    """z statistic of ``a.mean - b.mean`` using the window-level standard errors."""
    se = math.hypot(a.se_window, b.se_window)
    diff = a.mean_access_prob - b.mean_access_prob
    if se == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / se


def binomial_interval(p: float, trials: int, confidence: float) -> Tuple[float, float]:
    """Normal-approximation interval around a known proportion ``p``."""
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    half = z * math.sqrt(p * (1 - p) / trials)
    return p - half, p + half
