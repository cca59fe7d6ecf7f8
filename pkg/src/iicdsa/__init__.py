"""Blind iterative interference cancellation for K-repetition grant-free access."""
from .decoder import EngineOutcome, Termination, dec_crc, ic, run_engine, sic_decode_rb
from .framegen import AccessMap, SignalMatrix, generate_access_map, superpose
from .harness import SweepRow, SweepSpec, run_point, run_sweep
from .lineage import run_engine_fast
from .metrics import Counters, bound_alpha2, bound_alphaN, bound_general
from .model import UNBOUNDED, ChannelParams, PowerPool, SystemConfig, build_power_pool
from .oracle import closure_decode, exact_access_probability

__all__ = [
    "AccessMap", "ChannelParams", "Counters", "EngineOutcome", "PowerPool", "SignalMatrix",
    "SweepRow", "SweepSpec", "SystemConfig", "Termination", "UNBOUNDED", "bound_alpha2",
    "bound_alphaN", "bound_general", "build_power_pool", "closure_decode", "dec_crc",
    "exact_access_probability", "generate_access_map", "ic", "run_engine", "run_engine_fast",
    "run_point", "run_sweep", "sic_decode_rb", "superpose",
]
