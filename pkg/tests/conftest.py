import pytest

from iicdsa.model import ChannelParams, SystemConfig


@pytest.fixture
def unit_channel():
    return ChannelParams(1, 1)


def make_config(n, r, k, **kw):
    return SystemConfig(n_devices=n, n_rbs=r, k_repetitions=k, **kw)
