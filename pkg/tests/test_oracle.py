from fractions import Fraction

import pytest

from iicdsa.fixtures import fig3_map
from iicdsa.framegen import access_map_from_rbs, superpose
from iicdsa.model import ChannelParams, PowerPool, SystemConfig
from iicdsa.oracle import (
    MAX_ENUMERATION,
    closure_decode,
    enumeration_size,
    exact_access_probability,
    iter_access_maps,
)

CH = ChannelParams(1, 1)


def test_closure_fig3_gets_everyone():
    res = closure_decode(superpose(fig3_map()), CH)
    assert res.decodable == {0, 1, 2, 3, 4}
    assert res.witness[2] == {0, 1}


def test_closure_total_collision_is_empty():
    amap = access_map_from_rbs(2, [(0, 1), (0, 1)], [2, 2])
    assert closure_decode(superpose(amap), CH).decodable == frozenset()


def test_closure_single_device():
    amap = access_map_from_rbs(4, [(2,)], [1])
    assert closure_decode(superpose(amap), CH).decodable == {0}


def test_exact_probability_two_devices_two_rbs():
    assert exact_access_probability(SystemConfig(2, 2, 1)) == Fraction(5, 6)


@pytest.mark.parametrize("r,k", [(1, 1), (3, 2), (4, 4)])
def test_exact_probability_one_device(r, k):
    assert exact_access_probability(SystemConfig(1, r, k)) == 1


def test_exact_probability_forced_collision():
    cfg = SystemConfig(2, 2, 2, pool=PowerPool((Fraction(1),)))
    assert exact_access_probability(cfg) == 0


def test_enumeration_is_complete_and_distinct():
    cfg = SystemConfig(2, 3, 2)
    maps = list(iter_access_maps(cfg))
    assert len(maps) == enumeration_size(cfg) == (3 * 3) ** 2
    assert len(set(maps)) == len(maps)


def test_enumeration_guard():
    cfg = SystemConfig(12, 20, 5)
    assert enumeration_size(cfg) > MAX_ENUMERATION
    with pytest.raises(ValueError):
        exact_access_probability(cfg)
