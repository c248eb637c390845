"""Frequency transformation block: per-frame attention over bins plus mixing.

Dataflow, per frame with shared parameters:
  attention path: conv over frequency (odd kernel, 1->1 channels), then a
  1x1 channel conv, then sigmoid -> weights in (0,1) per bin;
  the weighted frame goes through a bin-to-bin fully-connected layer, is
  stacked with the raw frame as two channels, and a final 1x1 conv mixes
  the pair back to one plane. No cross-frame term anywhere, so the block
  is causal by construction.
"""

from ..diffcore import (
    DiffTensor,
    concat,
    conv1d_freq_forward,
    conv2d_forward,
    linear_forward,
    mul,
    permute,
    reshape,
    sigmoid,
)
from ..errors import ShapeError

PARAM_PREFIX = "ftrans"


def f_trans_param_shapes(cfg) -> dict:
    f, k = cfg.f_bins, cfg.ftrans_conv1d_kernel
    return {
        f"{PARAM_PREFIX}.conv1d.weight": (1, 1, k),
        f"{PARAM_PREFIX}.conv1d.bias": (1,),
        f"{PARAM_PREFIX}.att_conv2d.weight": (1, 1, 1, 1),
        f"{PARAM_PREFIX}.att_conv2d.bias": (1,),
        f"{PARAM_PREFIX}.fc.weight": (f, f),
        f"{PARAM_PREFIX}.fc.bias": (f,),
        f"{PARAM_PREFIX}.mix_conv2d.weight": (1, 2, 1, 1),
        f"{PARAM_PREFIX}.mix_conv2d.bias": (1,),
    }


def f_trans_forward(x: DiffTensor, params: dict) -> DiffTensor:
    """[F, T] -> [F, T]."""
    if x.data.ndim != 2:
        raise ShapeError(f"f_trans_forward: input must be [F, T], got {x.shape}")
    f, t = x.shape
    if params[f"{PARAM_PREFIX}.fc.weight"].shape != (f, f):
        raise ShapeError(
            f"f_trans_forward: parameters sized for "
            f"{params[f'{PARAM_PREFIX}.fc.weight'].shape[0]} bins, input has {f}"
        )
    x_ch = reshape(x, (1, f, t))
    att = conv1d_freq_forward(
        x_ch, params[f"{PARAM_PREFIX}.conv1d.weight"], params[f"{PARAM_PREFIX}.conv1d.bias"]
    )
    att = conv2d_forward(
        att, params[f"{PARAM_PREFIX}.att_conv2d.weight"], params[f"{PARAM_PREFIX}.att_conv2d.bias"]
    )
    att = sigmoid(att)
    weighted = mul(att, x_ch)
    frames = permute(reshape(weighted, (f, t)), (1, 0))  # [T, F]
    fc_out = linear_forward(
        frames, params[f"{PARAM_PREFIX}.fc.weight"], params[f"{PARAM_PREFIX}.fc.bias"]
    )
    fc_ch = reshape(permute(fc_out, (1, 0)), (1, f, t))
    pair = concat([fc_ch, x_ch], axis=0)  # [2, F, T]
    mixed = conv2d_forward(
        pair, params[f"{PARAM_PREFIX}.mix_conv2d.weight"], params[f"{PARAM_PREFIX}.mix_conv2d.bias"]
    )
    return reshape(mixed, (f, t))
