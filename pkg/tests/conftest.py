import pytest

from features.channel.models import AngleSet, SystemConfig
from features.channel.synthesis import derive_link_params, draw_angles, los_components
from features.shared.numerics import RngStream, StreamPurpose


@pytest.fixture
def angles():
    return draw_angles(RngStream(2020, 0, StreamPurpose.ANGLES))


@pytest.fixture
def small_config(angles):
    return SystemConfig(M=4, N=16, angles=angles)


@pytest.fixture
def small_scenario(small_config):
    """(config, los, params) for a quick M=4, N=16 scenario"""
    los = los_components(small_config.angles, small_config.M, small_config.N)
    return small_config, los, derive_link_params(small_config)


@pytest.fixture
def fixed_angles():
    return AngleSet(theta_aoa_1=0.3, theta_aod_1=1.1, theta_aod_2=2.5, theta_aod_0=4.0)
