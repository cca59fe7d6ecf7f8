from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from iicdsa.fixtures import fig1b_map
from iicdsa.framegen import (
    AccessMap,
    access_map_from_rbs,
    generate_access_map,
    superpose,
    window_rng,
)
from iicdsa.model import SystemConfig


def test_fig1b_scale_map_has_three_replicas_per_device():
    cfg = SystemConfig(5, 10, 3, seed=4)
    amap = generate_access_map(cfg, window_rng(cfg.seed, 5, 10, 3, 0))
    assert amap.n_devices == 5
    assert all(len(set(rbs)) == 3 for rbs in amap.rb_choices)
    assert sum(len(rbs) for rbs in amap.rb_choices) == 15


def test_single_device_single_rb():
    cfg = SystemConfig(1, 1, 1)
    amap = generate_access_map(cfg, window_rng(0, 0))
    assert amap.rb_choices == ((0,),)


def test_k_equals_r_forces_all_rbs():
    cfg = SystemConfig(2, 2, 2)
    amap = generate_access_map(cfg, window_rng(0, 0))
    assert amap.rb_choices == ((0, 1), (0, 1))
    m0 = superpose(amap)
    assert all(rb.device_ids() == {0, 1} for rb in m0.rbs)


def test_fig1b_exclusive_rbs():
    m0 = superpose(fig1b_map())
    singles = [i + 1 for i, rb in enumerate(m0.rbs) if len(rb.real) == 1]
    assert singles == [3, 4, 6]


def test_empty_device_set_gives_empty_rbs():
    m0 = superpose(access_map_from_rbs(4, [], []))
    assert all(not rb.real and not rb.ghosts for rb in m0.rbs)


def test_same_key_same_map():
    cfg = SystemConfig(30, 50, 4)
    a = generate_access_map(cfg, window_rng(9, 30, 50, 4, 17))
    b = generate_access_map(cfg, window_rng(9, 30, 50, 4, 17))
    c = generate_access_map(cfg, window_rng(9, 30, 50, 4, 18))
    assert a == b and a != c


def test_rb_subsets_and_powers_are_uniform():
    # 20000 single-device draws of 2 RBs out of 4: six subsets, three powers
    cfg = SystemConfig(1, 4, 2)
    subsets, powers = Counter(), Counter()
    for w in range(20000):
        amap = generate_access_map(cfg, window_rng(1, w))
        subsets[amap.rb_choices[0]] += 1
        powers[amap.powers[0]] += 1
    assert len(subsets) == 6
    for count in subsets.values():
        assert abs(count / 20000 - 1 / 6) < 0.015
    for count in powers.values():
        assert abs(count / 20000 - 1 / 3) < 0.015


def test_power_probs_weights():
    cfg = SystemConfig(200, 10, 1)
    amap = generate_access_map(cfg, window_rng(0, 1), power_probs=[0, 0, 1])
    assert set(amap.powers) == {4}
    with pytest.raises(ValueError):
        generate_access_map(cfg, window_rng(0, 1), power_probs=[1])


def test_access_map_validation():
    with pytest.raises(ValueError):
        AccessMap(3, ((0, 0),), (1,))
    with pytest.raises(ValueError):
        AccessMap(3, ((0, 3),), (1,))
    with pytest.raises(ValueError):
        AccessMap(3, ((0,),), (0,))


def test_superpose_checks_config():
    amap = access_map_from_rbs(3, [(0,)], [3])
    with pytest.raises(ValueError):
        superpose(amap, SystemConfig(1, 3, 1))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 12), r=st.integers(1, 12), data=st.data())
def test_json_round_trip_and_superpose_conservation(n, r, data):
    k = data.draw(st.integers(1, r))
    seed = data.draw(st.integers(0, 2**32))
    cfg = SystemConfig(n, r, k)
    amap = generate_access_map(cfg, window_rng(seed, n, r, k, 0))
    assert AccessMap.from_json(amap.to_json()) == amap
    m0 = superpose(amap, cfg)
    assert sum(len(rb.real) for rb in m0.rbs) == n * k
    for d, rbs in enumerate(amap.rb_choices):
        holders = [i for i, rb in enumerate(m0.rbs) if d in rb.device_ids()]
        assert holders == list(rbs)
    total = sum(rb.total_power() for rb in m0.rbs)
    assert total == k * sum(amap.powers)


def test_window_rng_is_pcg64():
    assert isinstance(window_rng(0, 1).bit_generator, np.random.PCG64)
