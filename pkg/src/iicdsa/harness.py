"""Monte Carlo runner and parameter sweeps.

Frames are keyed by ``(seed, N, R, K, window)``, so every iteration cap at
the same operating point decodes the same frames. That makes cap-to-cap
comparisons paired, and lets one frame serve every cap in a sweep.

All per-point aggregates are integer sums, so results do not depend on how
windows are split across workers.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .decoder import DEFAULT_SAFETY_CAP, run_engine
from .framegen import generate_access_map, superpose, window_rng
from .lineage import RbSolver, SicTable, outcome_for, trajectory
from .metrics import access_stat
from .model import (
    UNBOUNDED,
    Alpha,
    ChannelParams,
    PowerPool,
    SystemConfig,
    as_fraction,
    build_power_pool,
    parse_alpha,
)

DEFAULT_R = 100
DEFAULT_MAX_CELLS = 10**6
CSV_FIELDS = (
    "gamma", "n", "r", "k", "alpha", "windows", "access_prob", "ci95",
    "mean_wr", "mean_dec", "mean_peak_storage", "seed",
)


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    n: int
    r: int
    k: int
    alpha: Alpha
    windows: int
    access_prob: float
    ci95: float
    mean_wr: float
    mean_dec: float
    mean_peak_storage: float
    seed: int
    # not written to CSV
    se_window: float = 0.0
    max_wr: int = 0
    max_dec: int = 0
    max_peak_storage: int = 0
    capped_windows: int = 0
    budget_hits: int = 0

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in CSV_FIELDS}


@dataclass
class _Tally:
    decoded: int = 0
    decoded_sq: int = 0
    wr: int = 0
    dec: int = 0
    sto: int = 0
    max_wr: int = 0
    max_dec: int = 0
    max_sto: int = 0
    capped: int = 0
    budget: int = 0

    def add(self, outcome) -> None:
        c = outcome.counters
        got = len(outcome.decoded)
        self.decoded += got
        self.decoded_sq += got * got
        self.wr += c.wr_ops
        self.dec += c.dec_ops
        self.sto += c.peak_storage
        self.max_wr = max(self.max_wr, c.wr_ops)
        self.max_dec = max(self.max_dec, c.dec_ops)
        self.max_sto = max(self.max_sto, c.peak_storage)
        self.capped += outcome.capped
        self.budget += outcome.budget_hit

    def merge(self, other: "_Tally") -> None:
        for name in ("decoded", "decoded_sq", "wr", "dec", "sto", "capped", "budget"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.max_wr = max(self.max_wr, other.max_wr)
        self.max_dec = max(self.max_dec, other.max_dec)
        self.max_sto = max(self.max_sto, other.max_sto)


def _worker_count(threads: Optional[int]) -> int:
    if threads is None:
        env = os.environ.get("GFA_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    if threads < 1:
        raise ValueError(f"thread count must be positive, got {threads}")
    return threads


def _run_chunk(args) -> List[_Tally]:
    config, alphas, start, stop, engine, safety_cap, max_cells, power_probs = args
    tallies = [_Tally() for _ in alphas]
    channel, levels = config.channel, config.pool.levels
    solver = RbSolver(SicTable(channel, levels))
    n, r, k = config.n_devices, config.n_rbs, config.k_repetitions
    for w in range(start, stop):
        amap = generate_access_map(config, window_rng(config.seed, n, r, k, w), power_probs)
        if engine == "fast":
            traj = trajectory(amap, channel, levels, solver)
            for tally, alpha in zip(tallies, alphas):
                tally.add(outcome_for(traj, alpha, safety_cap))
        else:
            m0 = superpose(amap, config)
            for tally, alpha in zip(tallies, alphas):
                tally.add(
                    run_engine(m0, config, amap, alpha, safety_cap=safety_cap, max_cells=max_cells)
                )
    return tallies


def run_group(
    config: SystemConfig,
    alphas: Sequence[Alpha],
    *,
    engine: str = "fast",
    threads: Optional[int] = None,
    safety_cap: Optional[int] = DEFAULT_SAFETY_CAP,
    max_cells: Optional[int] = DEFAULT_MAX_CELLS,
    power_probs: Optional[Sequence[float]] = None,
    chunk: int = 1000,
) -> List[SweepRow]:
    """One row per iteration cap, all decoded from the same frames.

    ``engine="fast"`` replays the decoder by lineage; ``"materialized"``
    builds every matrix and honours ``max_cells``. Both give identical
    results when the cell budget is not hit.
    """
    if engine not in ("fast", "materialized"):
        raise ValueError(f"unknown engine {engine!r}")
    alphas = [parse_alpha(a) for a in alphas]
    if not alphas:
        raise ValueError("need at least one alpha")
    workers = _worker_count(threads)
    bounds = [(s, min(s + chunk, config.windows)) for s in range(0, config.windows, chunk)]
    jobs = [
        (config, alphas, s, e, engine, safety_cap, max_cells, power_probs) for s, e in bounds
    ]
    if workers == 1 or len(jobs) == 1:
        parts = [_run_chunk(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    totals = [_Tally() for _ in alphas]
    for part in parts:
        for total, tally in zip(totals, part):
            total.merge(tally)
    return [_row(config, alpha, total) for alpha, total in zip(alphas, totals)]


def _row(config: SystemConfig, alpha: Alpha, t: _Tally) -> SweepRow:
    n, w = config.n_devices, config.windows
    stat = access_stat(t.decoded / n, t.decoded_sq / (n * n), w, n)
    return SweepRow(
        gamma=float(config.gamma),
        n=n,
        r=config.n_rbs,
        k=config.k_repetitions,
        alpha=alpha,
        windows=w,
        access_prob=stat.mean_access_prob,
        ci95=stat.ci95_halfwidth,
        mean_wr=t.wr / w,
        mean_dec=t.dec / w,
        mean_peak_storage=t.sto / w,
        seed=config.seed,
        se_window=stat.se_window,
        max_wr=t.max_wr,
        max_dec=t.max_dec,
        max_peak_storage=t.max_sto,
        capped_windows=t.capped,
        budget_hits=t.budget,
    )


def run_point(config: SystemConfig, **kwargs) -> SweepRow:
    """Simulate ``config.windows`` frames at ``config.alpha``."""
    return run_group(config, [config.alpha], **kwargs)[0]


@dataclass(frozen=True)
class SweepSpec:
    """Grid of operating points.

    Give either ``gammas`` (realized as N = round(gamma * r)) or explicit
    ``pairs`` of (N, R).
    """

    k_values: Tuple[int, ...]
    alpha_values: Tuple[Alpha, ...]
    windows: int = 10_000
    seed: int = 0
    gammas: Tuple[Fraction, ...] = ()
    pairs: Tuple[Tuple[int, int], ...] = ()
    r: int = DEFAULT_R
    channel: ChannelParams = field(default_factory=ChannelParams)
    pool: Optional[PowerPool] = None

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "alpha_values", tuple(parse_alpha(a) for a in self.alpha_values))
        object.__setattr__(self, "gammas", tuple(as_fraction(g) for g in self.gammas))
        object.__setattr__(self, "pairs", tuple((int(n), int(r)) for n, r in self.pairs))
        if not self.k_values or not self.alpha_values:
            raise ValueError("k_values and alpha_values must be non-empty")
        if bool(self.gammas) == bool(self.pairs):
            raise ValueError("give exactly one of gammas or pairs")
        if self.pool is None:
            object.__setattr__(self, "pool", build_power_pool(self.channel, 3))

    def nr_points(self) -> List[Tuple[int, int]]:
        if self.pairs:
            return list(self.pairs)
        points = []
        for g in self.gammas:
            n = round(g * self.r)
            if n < 1:
                raise ValueError(f"gamma {g} gives no devices at R={self.r}")
            points.append((n, self.r))
        return points

    def size(self) -> int:
        return len(self.nr_points()) * len(self.k_values) * len(self.alpha_values)


def run_sweep(spec: SweepSpec, **kwargs) -> List[SweepRow]:
    """Rows in (N/R point, K, alpha) order, alpha varying fastest."""
    rows = []
    for n, r in spec.nr_points():
        for k in spec.k_values:
            config = SystemConfig(
                n_devices=n,
                n_rbs=r,
                k_repetitions=k,
                alpha=spec.alpha_values[0],
                channel=spec.channel,
                pool=spec.pool,
                windows=spec.windows,
                seed=spec.seed,
            )
            rows.extend(run_group(config, spec.alpha_values, **kwargs))
    return rows


def fig4_spec(windows: int = 10_000, seed: int = 0, r: int = DEFAULT_R) -> SweepSpec:
    return SweepSpec(
        gammas=tuple(Fraction(g, 10) for g in range(1, 10)),
        k_values=(2, 3, 4, 5),
        alpha_values=(1, 2, UNBOUNDED),
        windows=windows,
        seed=seed,
        r=r,
    )


def fig5_spec(windows: int = 10_000, seed: int = 0, r: int = DEFAULT_R) -> SweepSpec:
    return SweepSpec(
        gammas=(Fraction(3, 10), Fraction(6, 10), Fraction(9, 10)),
        k_values=(2, 4),
        alpha_values=(1, 2, 3, 4, 5),
        windows=windows,
        seed=seed,
        r=r,
    )
