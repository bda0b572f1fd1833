from .models import (
    AngleSet,
    ChannelRealization,
    LinkParams,
    LosComponents,
    NlosComponents,
    SystemConfig,
)
from .synthesis import (
    check_unit_modulus,
    dbm_to_watts,
    derive_link_params,
    draw_angles,
    effective_row,
    los_components,
    mix_channel,
    noise_power_watts,
    rician_weights,
    sample_channel,
    sample_fading,
)

__all__ = [
    'AngleSet', 'ChannelRealization', 'LinkParams', 'LosComponents', 'NlosComponents',
    'SystemConfig', 'check_unit_modulus', 'dbm_to_watts', 'derive_link_params', 'draw_angles',
    'effective_row', 'los_components', 'mix_channel', 'noise_power_watts', 'rician_weights',
    'sample_channel', 'sample_fading',
]
