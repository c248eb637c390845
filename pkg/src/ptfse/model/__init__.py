"""The enhancement network: blocks, assembly, and parameter accounting."""

from .config import LOSS_KINDS, ModelConfig, compact_config, full_scale_config, tiny_config
from .ftrans import f_trans_forward, f_trans_param_shapes
from .fullband import g_full_forward, g_full_param_shapes
from .network import (
    PARAM_COUNT_VARIANTS,
    check_params_match,
    init_params,
    look_ahead_ms,
    look_ahead_samples,
    param_breakdown,
    param_count,
    param_shapes,
    pt_fse_forward,
)
from .subband import SubbandInput, g_sub_forward, g_sub_param_shapes, subband_unfold
from .ttrans import t_trans_forward, t_trans_param_shapes

__all__ = [
    "LOSS_KINDS",
    "ModelConfig",
    "PARAM_COUNT_VARIANTS",
    "SubbandInput",
    "check_params_match",
    "compact_config",
    "f_trans_forward",
    "f_trans_param_shapes",
    "full_scale_config",
    "g_full_forward",
    "g_full_param_shapes",
    "g_sub_forward",
    "g_sub_param_shapes",
    "init_params",
    "look_ahead_ms",
    "look_ahead_samples",
    "param_breakdown",
    "param_count",
    "param_shapes",
    "pt_fse_forward",
    "subband_unfold",
    "t_trans_forward",
    "t_trans_param_shapes",
    "tiny_config",
]
