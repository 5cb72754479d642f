"""Joint beamforming and hybrid active/passive IRS reflection design."""
from .channel import ChannelSet, ScenarioConfig, build_channels, load_scenario, path_loss_linear, steering_vector
from .irs_model import (
    IrsLayout,
    MaskPair,
    ReflectionState,
    achievable_rate,
    irs_transmit_power,
    irs_transmit_power_vector,
    masks,
    rate,
    snr,
)

__version__ = "0.1.0"
