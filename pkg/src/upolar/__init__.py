"""Universal polar codes built from slow (heterogeneous) polarization plus a fast Arikan stage."""

from .bounds import bound_table, check_g_monotone, design_delta, f_step, g_step, h, h_inv
from .channels import (Channel, ChannelMetrics, bhattacharyya, capacity, degrade_quantize, erase, is_less_noisy,
                       make_bec, make_bsc, make_z_channel, metrics, mixture, parse_channel)
from .codec import DecodeResult, LlrVector, channel_llr, decode_batch, encode, encode_batch, sc_decode
from .construction import (ChannelLabel, CodeSpec, TransformPlan, attach_fast_stage, build_general,
                           build_rate_half, dump_plan, parse_plan)
from .estimator import UniversalPolarCode
from .simulation import SimConfig, SimResult, run_mc
from .transforms import general_rate_recursion, minus, plus, slow_recursion

__version__ = "0.1.0"

__all__ = [
    "Channel", "ChannelMetrics", "ChannelLabel", "CodeSpec", "DecodeResult", "LlrVector", "SimConfig",
    "SimResult", "TransformPlan", "UniversalPolarCode", "attach_fast_stage", "bhattacharyya", "bound_table",
    "build_general", "build_rate_half", "capacity", "channel_llr", "check_g_monotone", "decode_batch",
    "degrade_quantize", "design_delta", "dump_plan", "encode", "encode_batch", "erase", "f_step", "g_step",
    "general_rate_recursion", "h", "h_inv", "is_less_noisy", "make_bec", "make_bsc", "make_z_channel",
    "metrics", "minus", "mixture", "parse_channel", "parse_plan", "plus", "run_mc", "sc_decode",
    "slow_recursion",
]
