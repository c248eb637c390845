"""Temporal transformation block: a recurrent gate over frames.

A single-layer LSTM watches the running history; at frame t its state has
consumed frames 0..t-1 (the history for the first frame is one zero
frame). That state and the current frame meet in a bottleneck sum, and a
final layer plus sigmoid produces per-bin gate weights that rescale the
frame. Output frame t therefore depends on input frames 0..t only.
"""

import numpy as np

from ..diffcore import (
    DiffTensor,
    add,
    concat,
    linear_forward,
    lstm_forward,
    mul,
    narrow,
    permute,
    sigmoid,
)
from ..errors import ShapeError

PARAM_PREFIX = "ttrans"


def t_trans_param_shapes(cfg) -> dict:
    f, hidden, fc = cfg.f_bins, cfg.ttrans_hidden, cfg.ttrans_fc
    return {
        f"{PARAM_PREFIX}.lstm1.w_ih": (4 * hidden, f),
        f"{PARAM_PREFIX}.lstm1.w_hh": (4 * hidden, hidden),
        f"{PARAM_PREFIX}.lstm1.b_ih": (4 * hidden,),
        f"{PARAM_PREFIX}.lstm1.b_hh": (4 * hidden,),
        f"{PARAM_PREFIX}.fc_hidden.weight": (fc, hidden),
        f"{PARAM_PREFIX}.fc_hidden.bias": (fc,),
        f"{PARAM_PREFIX}.fc_input.weight": (fc, f),
        f"{PARAM_PREFIX}.fc_input.bias": (fc,),
        f"{PARAM_PREFIX}.fc_out.weight": (f, fc),
        f"{PARAM_PREFIX}.fc_out.bias": (f,),
    }


def t_trans_forward(e: DiffTensor, params: dict, hidden: int) -> DiffTensor:
    """[F, T] -> [F, T]."""
    if e.data.ndim != 2:
        raise ShapeError(f"t_trans_forward: input must be [F, T], got {e.shape}")
    f, t = e.shape
    if params[f"{PARAM_PREFIX}.lstm1.w_ih"].shape[1] != f:
        raise ShapeError(
            f"t_trans_forward: parameters sized for "
            f"{params[f'{PARAM_PREFIX}.lstm1.w_ih'].shape[1]} bins, input has {f}"
        )
    frames = permute(e, (1, 0))  # [T, F]
    zero_frame = DiffTensor(np.zeros((1, f), dtype=e.dtype))
    if t > 1:
        history = concat([zero_frame, narrow(frames, 0, 0, t - 1)], axis=0)
    else:
        history = zero_frame
    lstm_params = [{k: params[f"{PARAM_PREFIX}.lstm1.{k}"]
                    for k in ("w_ih", "w_hh", "b_ih", "b_hh")}]
    state, _ = lstm_forward(history, 1, hidden, lstm_params)  # [T, hidden]
    merged = add(
        linear_forward(state, params[f"{PARAM_PREFIX}.fc_hidden.weight"],
                       params[f"{PARAM_PREFIX}.fc_hidden.bias"]),
        linear_forward(frames, params[f"{PARAM_PREFIX}.fc_input.weight"],
                       params[f"{PARAM_PREFIX}.fc_input.bias"]),
    )
    gate = sigmoid(linear_forward(merged, params[f"{PARAM_PREFIX}.fc_out.weight"],
                                  params[f"{PARAM_PREFIX}.fc_out.bias"]))
    return permute(mul(gate, frames), (1, 0))
