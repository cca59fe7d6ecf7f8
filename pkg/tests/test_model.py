import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from iicdsa.model import (
    UNBOUNDED,
    ChannelParams,
    DecodedSignal,
    PowerPool,
    SystemConfig,
    as_fraction,
    build_power_pool,
    format_alpha,
    parse_alpha,
)


def test_pool_unit_channel_three_levels():
    assert build_power_pool(ChannelParams(1, 1), 3).levels == (1, 2, 4)


def test_pool_single_level():
    assert build_power_pool(ChannelParams(1, 1), 1).levels == (1,)


def test_pool_tau_two():
    assert build_power_pool(ChannelParams(2, 1), 3).levels == (2, 6, 18)


@pytest.mark.parametrize("bad", [0, -1, 1.5, True])
def test_pool_rejects_bad_level_count(bad):
    with pytest.raises(ValueError):
        build_power_pool(ChannelParams(1, 1), bad)


@given(
    tau=st.fractions(min_value=Fraction(1, 4), max_value=4),
    noise=st.fractions(min_value=Fraction(1, 8), max_value=8),
    levels=st.integers(1, 6),
)
def test_each_level_decodes_exactly_at_threshold_over_all_weaker(tau, noise, levels):
    ch = ChannelParams(tau, noise)
    pool = build_power_pool(ch, levels)
    assert pool == build_power_pool(ch, levels)
    for i, p in enumerate(pool.levels):
        below = sum(pool.levels[:i], Fraction(0))
        assert p == tau * (below + noise)
        assert ch.decodable(p, below)
        assert not ch.decodable(p - Fraction(1, 10**9), below)


def test_decodable_is_non_strict():
    ch = ChannelParams(1, 1)
    assert ch.decodable(Fraction(1), Fraction(0))
    assert not ch.decodable(Fraction(1), Fraction(1))


def test_channel_rejects_nonpositive():
    with pytest.raises(ValueError):
        ChannelParams(0, 1)
    with pytest.raises(ValueError):
        ChannelParams(1, -1)


def test_power_pool_must_increase():
    with pytest.raises(ValueError):
        PowerPool((1, 1))
    with pytest.raises(ValueError):
        PowerPool(())
    pool = PowerPool((1, 2, 4))
    assert 2 in pool and 3 not in pool and pool.index(4) == 2


def test_as_fraction_reads_floats_by_decimal_repr():
    assert as_fraction(0.1) == Fraction(1, 10)
    with pytest.raises(ValueError):
        as_fraction(math.inf)


@pytest.mark.parametrize("text,expected", [("inf", UNBOUNDED), (None, UNBOUNDED), ("3", 3), (2, 2), (4.0, 4), (math.inf, UNBOUNDED)])
def test_parse_alpha(text, expected):
    assert parse_alpha(text) == expected


@pytest.mark.parametrize("bad", [0, -2, "x", 2.5, True])
def test_parse_alpha_rejects(bad):
    with pytest.raises(ValueError):
        parse_alpha(bad)


def test_format_alpha():
    assert format_alpha(UNBOUNDED) == "inf"
    assert format_alpha(3) == "3"


def test_system_config_validation_and_gamma():
    cfg = SystemConfig(5, 10, 3)
    assert cfg.gamma == Fraction(1, 2)
    assert cfg.pool.levels == (1, 2, 4)
    assert cfg.alpha == UNBOUNDED
    with pytest.raises(ValueError):
        SystemConfig(5, 2, 3)
    with pytest.raises(ValueError):
        SystemConfig(5, 10, 0)
    with pytest.raises(ValueError):
        SystemConfig(5, 10, 1, seed=-1)


def test_decoded_signal_orders_by_id():
    assert sorted([DecodedSignal(2, 1), DecodedSignal(0, 4)])[0].device_id == 0
