"""Command-line entry point.

Subcommands::

    run       one operating point, one row per --alpha value
    sweep     grid over gamma (or N), K and alpha; optional SVG plot
    oracle    exact access probability by enumeration (tiny instances)
    fixtures  decode the hand-built maps at each --alpha

Every flag is validated before any work starts, and all problems are
reported together. Exit codes: 0 ok, 1 runtime or I/O error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .decoder import DEFAULT_SAFETY_CAP, run_engine, trace_jsonl
from .fixtures import FIXTURES, get_fixture
from .framegen import superpose
from .harness import DEFAULT_MAX_CELLS, DEFAULT_R, SweepSpec, run_group, run_sweep
from .model import (
    Alpha,
    ChannelParams,
    PowerPool,
    SystemConfig,
    as_fraction,
    build_power_pool,
    format_alpha,
    parse_alpha,
)
from .oracle import MAX_ENUMERATION, enumeration_size, exact_access_probability
from .plot import PlotAxes, emit_plot
from .results import ResultsIOError, write_results

SUBCOMMANDS = ("run", "sweep", "oracle", "fixtures")

# flag -> config-file key; config keys use the flag name without dashes
FLAGS = (
    "n", "r", "k", "alpha", "windows", "seed", "tau", "noise", "levels", "gamma",
    "out", "format", "plot", "engine", "trace", "name", "threads", "safety_cap", "max_cells",
)
ALLOWED = {
    "run": {"n", "r", "k", "alpha", "windows", "seed", "tau", "noise", "levels",
            "out", "format", "engine", "trace", "threads", "safety_cap", "max_cells"},
    "sweep": {"n", "r", "k", "alpha", "windows", "seed", "tau", "noise", "levels", "gamma",
              "out", "format", "plot", "engine", "threads", "safety_cap", "max_cells"},
    "oracle": {"n", "r", "k", "tau", "noise", "levels", "out"},
    "fixtures": {"name", "alpha", "tau", "noise", "levels", "out", "trace"},
}
DEFAULTS = {
    "run": {"n": 5, "r": 10, "k": 3, "alpha": "inf", "windows": 1000, "seed": 0},
    "sweep": {"r": DEFAULT_R, "k": "2,3,4,5", "alpha": "1,2,inf", "windows": 10000, "seed": 0},
    "oracle": {"n": 2, "r": 2, "k": 1},
    "fixtures": {"alpha": "1,2,3,inf"},
}
COMMON_DEFAULTS = {
    "tau": "1", "noise": "1", "levels": "3", "out": "-", "format": "csv",
    "engine": "fast", "safety_cap": str(DEFAULT_SAFETY_CAP), "max_cells": str(DEFAULT_MAX_CELLS),
}


class UsageError(Exception):
    def __init__(self, problems: Sequence[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


@dataclass
class CliConfig:
    subcommand: str
    channel: ChannelParams = field(default_factory=ChannelParams)
    pool: Optional[PowerPool] = None
    n: Tuple[int, ...] = ()
    r: int = DEFAULT_R
    k: Tuple[int, ...] = ()
    alpha: Tuple[Alpha, ...] = ()
    gamma: Tuple[Fraction, ...] = ()
    windows: int = 1
    seed: int = 0
    out: str = "-"
    format: str = "csv"
    plot: Optional[str] = None
    engine: str = "fast"
    trace: Optional[str] = None
    name: Tuple[str, ...] = FIXTURES
    threads: Optional[int] = None
    safety_cap: Optional[int] = DEFAULT_SAFETY_CAP
    max_cells: Optional[int] = DEFAULT_MAX_CELLS


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iicdsa",
        description="Blind iterative interference cancellation for K-repetition grant-free access.",
        add_help=True,
    )
    parser.add_argument("subcommand", nargs="?", help="|".join(SUBCOMMANDS))
    parser.add_argument("--config", help="JSON file of flag values; explicit flags win")
    for flag in FLAGS:
        parser.add_argument("--" + flag.replace("_", "-"), dest=flag, default=None)
    return parser


def _number_list(text: str, conv) -> List:
    """``a,b,c`` or ``start:stop:step`` (inclusive stop)."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range must be start:stop:step")
        start, stop, step = (as_fraction(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError("range needs step > 0 and stop >= start")
        out, v = [], start
        while v <= stop:
            out.append(conv(v))
            v += step
        return out
    items = [t for t in text.split(",")]
    if not items or any(not t.strip() for t in items):
        raise ValueError("empty list item")
    return [conv(t.strip()) for t in items]


def _pos_int(v) -> int:
    f = as_fraction(v)
    if f.denominator != 1 or f < 1:
        raise ValueError(f"{v} is not a positive integer")
    return int(f)


def _pos_fraction(v) -> Fraction:
    f = as_fraction(v)
    if f <= 0:
        raise ValueError(f"{v} is not positive")
    return f


def _seed(v) -> int:
    s = int(str(v))
    if not 0 <= s < 2**64:
        raise ValueError("seed must be in [0, 2^64)")
    return s


def _merged(ns: argparse.Namespace, sub: str, problems: List[str]) -> Dict[str, str]:
    values: Dict[str, object] = dict(COMMON_DEFAULTS)
    values.update(DEFAULTS[sub])
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except OSError as exc:
            problems.append(f"--config: cannot read {ns.config}: {exc.strerror or exc}")
            data = {}
        except json.JSONDecodeError as exc:
            problems.append(f"--config: {ns.config} is not valid JSON ({exc.msg})")
            data = {}
        if not isinstance(data, dict):
            problems.append("--config: file must hold a JSON object")
            data = {}
        for key, value in data.items():
            flag = key.replace("-", "_")
            if flag not in FLAGS:
                problems.append(f"--config: unknown key {key!r}")
            elif flag not in ALLOWED[sub]:
                problems.append(f"--config: key {key!r} does not apply to {sub}")
            elif isinstance(value, list):
                values[flag] = ",".join(str(v) for v in value)
            else:
                values[flag] = value
    for flag in FLAGS:
        given = getattr(ns, flag)
        if given is None:
            continue
        if flag not in ALLOWED[sub]:
            problems.append(f"--{flag.replace('_', '-')}: not accepted by {sub}")
        else:
            values[flag] = given
    return values


def parse_args(argv: Sequence[str]) -> CliConfig:
    """Validate ``argv`` into a :class:`CliConfig`; raise :class:`UsageError` listing every problem."""
    parser = _build_parser()
    ns, unknown = parser.parse_known_args(list(argv))
    problems = [f"{u}: unknown flag or stray argument" for u in unknown]
    sub = ns.subcommand
    if sub not in SUBCOMMANDS:
        problems.insert(0, f"subcommand must be one of {', '.join(SUBCOMMANDS)}, got {sub!r}")
        raise UsageError(problems)
    values = _merged(ns, sub, problems)
    cfg = CliConfig(subcommand=sub)

    def take(flag, conv):
        if flag not in values or values[flag] is None:
            return None
        try:
            return conv(values[flag])
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            problems.append(f"--{flag.replace('_', '-')}: {exc}")
            return None

    tau = take("tau", _pos_fraction)
    noise = take("noise", _pos_fraction)
    if tau is not None and noise is not None:
        cfg.channel = ChannelParams(tau, noise)

    def levels(text):
        items = str(text).split(",")
        if len(items) == 1:
            return _pos_int(items[0])
        return PowerPool(tuple(_pos_fraction(t) for t in items))

    lv = take("levels", levels)
    if isinstance(lv, int):
        cfg.pool = build_power_pool(cfg.channel, lv)
    elif lv is not None:
        cfg.pool = lv

    single_n = sub in ("run", "oracle")
    n = take("n", lambda t: _number_list(t, _pos_int))
    if n is not None:
        if single_n and len(n) != 1:
            problems.append(f"--n: {sub} takes a single value")
        cfg.n = tuple(n)
    r = take("r", _pos_int)
    if r is not None:
        cfg.r = r
    k = take("k", lambda t: _number_list(t, _pos_int))
    if k is not None:
        if sub == "oracle" and len(k) != 1:
            problems.append("--k: oracle takes a single value")
        if r is not None and any(v > r for v in k):
            problems.append(f"--k: K must not exceed R={r}")
        cfg.k = tuple(k)
    a = take("alpha", lambda t: _number_list(t, lambda v: parse_alpha(str(v))))
    if a is not None:
        cfg.alpha = tuple(a)
    g = take("gamma", lambda t: _number_list(t, _pos_fraction))
    if g is not None:
        cfg.gamma = tuple(g)
    for flag in ("windows", "threads"):
        v = take(flag, _pos_int)
        if v is not None:
            setattr(cfg, flag, v)
    seed = take("seed", _seed)
    if seed is not None:
        cfg.seed = seed
    for flag in ("safety_cap", "max_cells"):
        v = take(flag, lambda t: None if str(t).lower() in ("none", "off") else _pos_int(t))
        if flag in values:
            setattr(cfg, flag, v)

    fmt = values.get("format")
    if fmt not in ("csv", "json"):
        problems.append(f"--format: must be csv or json, got {fmt!r}")
    else:
        cfg.format = fmt
    engine = values.get("engine")
    if engine not in ("fast", "materialized"):
        problems.append(f"--engine: must be fast or materialized, got {engine!r}")
    else:
        cfg.engine = engine
    cfg.out = str(values.get("out", "-"))
    cfg.plot = values.get("plot")
    cfg.trace = values.get("trace")
    if "name" in values and values["name"] is not None:
        names = tuple(t.strip() for t in str(values["name"]).split(","))
        bad = [t for t in names if t not in FIXTURES]
        if bad:
            problems.append(f"--name: unknown fixture(s) {', '.join(bad)}; choose from {', '.join(FIXTURES)}")
        cfg.name = names

    if sub == "sweep":
        if cfg.gamma and cfg.n:
            problems.append("--gamma/--n: give one of them, not both")
        if not cfg.gamma and not cfg.n:
            problems.append("--gamma: sweep needs --gamma or --n")
        if cfg.plot is not None and cfg.plot == "-":
            problems.append("--plot: needs a file path")
    if sub == "run" and cfg.trace is not None:
        if cfg.windows != 1:
            problems.append("--trace: only available with --windows 1")
        if cfg.engine != "materialized":
            cfg.engine = "materialized"
    if sub == "oracle" and not problems:
        try:
            conf = SystemConfig(cfg.n[0], cfg.r, cfg.k[0], channel=cfg.channel, pool=cfg.pool)
            size = enumeration_size(conf)
            if size > MAX_ENUMERATION:
                problems.append(f"--n/--r/--k: enumeration space {size} exceeds {MAX_ENUMERATION}")
        except ValueError as exc:
            problems.append(f"--n/--r/--k: {exc}")
    if sub == "run" and not problems:
        try:
            SystemConfig(cfg.n[0], cfg.r, cfg.k[0], channel=cfg.channel, pool=cfg.pool)
        except ValueError as exc:
            problems.append(f"--n/--r/--k: {exc}")
        if len(cfg.k) != 1:
            problems.append("--k: run takes a single value")
    if problems:
        raise UsageError(problems)
    return cfg


def _configs(cfg: CliConfig):
    for n in cfg.n:
        for k in cfg.k:
            yield SystemConfig(n, cfg.r, k, channel=cfg.channel, pool=cfg.pool,
                               windows=cfg.windows, seed=cfg.seed)


def _engine_kw(cfg: CliConfig) -> dict:
    return dict(engine=cfg.engine, threads=cfg.threads, safety_cap=cfg.safety_cap, max_cells=cfg.max_cells)


def _note_guards(rows) -> None:
    # CSV columns are fixed, so guard hits are reported on stderr
    for row in rows:
        if row.capped_windows or row.budget_hits:
            print(
                f"iicdsa: note: n={row.n} r={row.r} k={row.k} alpha={format_alpha(row.alpha)}: "
                f"{row.capped_windows} window(s) hit the safety cap, "
                f"{row.budget_hits} hit the cell budget",
                file=sys.stderr,
            )


def _write_text(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise ResultsIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _cmd_run(cfg: CliConfig) -> None:
    config = next(_configs(cfg))
    if cfg.trace is not None:
        from .framegen import generate_access_map, window_rng

        n, r, k = config.n_devices, config.n_rbs, config.k_repetitions
        amap = generate_access_map(config, window_rng(config.seed, n, r, k, 0))
        m0 = superpose(amap, config)
        text = "".join(
            trace_jsonl(run_engine(m0, config, amap, a, safety_cap=cfg.safety_cap,
                                   max_cells=cfg.max_cells, trace=True))
            for a in cfg.alpha
        )
        _write_text(text, cfg.trace)
    rows = run_group(config, cfg.alpha, **_engine_kw(cfg))
    _note_guards(rows)
    write_results(rows, cfg.format, cfg.out)


def plot_axes_for(rows) -> PlotAxes:
    """x = gamma when several loads were swept, else x = alpha with counter panels."""
    gammas = {row.gamma for row in rows}
    if len(gammas) > 1:
        return PlotAxes(x="gamma", series=("k", "alpha"), title="Access probability vs user intensity")
    return PlotAxes(x="alpha", series=("k", "gamma"),
                    panels=("access_prob", "mean_wr", "mean_dec", "mean_peak_storage"),
                    title="Access probability and complexity vs iteration cap")


def _cmd_sweep(cfg: CliConfig) -> None:
    spec = SweepSpec(
        k_values=cfg.k,
        alpha_values=cfg.alpha,
        windows=cfg.windows,
        seed=cfg.seed,
        gammas=cfg.gamma,
        pairs=tuple((n, cfg.r) for n in cfg.n),
        r=cfg.r,
        channel=cfg.channel,
        pool=cfg.pool,
    )
    try:
        spec.nr_points()
        for n, r in spec.nr_points():
            for k in spec.k_values:
                SystemConfig(n, r, k)
    except ValueError as exc:
        raise UsageError([f"--gamma/--n/--k: {exc}"]) from exc
    rows = run_sweep(spec, **_engine_kw(cfg))
    _note_guards(rows)
    if cfg.plot:
        axes = plot_axes_for(rows)
        try:
            emit_plot(rows, axes, cfg.plot)
        except OSError as exc:
            raise ResultsIOError(f"cannot write {cfg.plot}: {exc.strerror or exc}") from exc
    write_results(rows, cfg.format, cfg.out)


def _cmd_oracle(cfg: CliConfig) -> None:
    config = SystemConfig(cfg.n[0], cfg.r, cfg.k[0], channel=cfg.channel, pool=cfg.pool)
    p = exact_access_probability(config)
    record = {
        "n": config.n_devices, "r": config.n_rbs, "k": config.k_repetitions,
        "pool": [str(x) for x in config.pool.levels],
        "access_maps": enumeration_size(config),
        "exact": str(p), "access_prob": float(p),
    }
    _write_text(json.dumps(record) + "\n", cfg.out)


def _cmd_fixtures(cfg: CliConfig) -> None:
    lines, traces = [], []
    for name in cfg.name:
        amap = get_fixture(name)
        config = SystemConfig(amap.n_devices, amap.n_rbs, len(amap.rb_choices[0]),
                              channel=cfg.channel, pool=cfg.pool)
        m0 = superpose(amap)
        for a in cfg.alpha:
            out = run_engine(m0, config, amap, a, trace=cfg.trace is not None)
            lines.append(json.dumps({
                "fixture": name,
                "alpha": format_alpha(a),
                "decoded": [f"n{d + 1}" for d in sorted(out.decoded)],
                "iterations": out.iterations_run,
                "terminated_by": out.terminated_by.value,
                "wr": out.counters.wr_ops, "dec": out.counters.dec_ops,
                "storage": out.counters.peak_storage,
            }))
            if cfg.trace is not None:
                traces.append(trace_jsonl(out))
    _write_text("\n".join(lines) + "\n", cfg.out)
    if cfg.trace is not None:
        _write_text("".join(traces), cfg.trace)


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "oracle": _cmd_oracle, "fixtures": _cmd_fixtures}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if any(a in ("-h", "--help") for a in argv):
        _build_parser().print_help()
        return 0
    try:
        cfg = parse_args(argv)
        COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        for problem in exc.problems:
            print(f"iicdsa: error: {problem}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"iicdsa: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
