"""Reverse-mode autodiff core: tensors, layers, gradient checking, Adam."""

from .adam import AdamState, adam_step, init_adam, staged_learning_rate
from .checkpoint import CHECKPOINT_MAGIC, load_checkpoint, save_checkpoint
from .gradcheck import grad_check, grad_check_params
from .layers import (
    avg_pool_freq,
    conv1d_freq_forward,
    conv2d_forward,
    linear_forward,
    lstm_forward,
    lstm_layer_param_shapes,
)
from .tensor import (
    DiffTensor,
    add,
    backward,
    concat,
    concat_last_dim,
    make_op,
    mean,
    mul,
    narrow,
    permute,
    pointwise,
    relu,
    reshape,
    scale,
    sigmoid,
    stack,
    sub,
    take_rows,
    tanh,
    tensor_sum,
    zero_grad,
)

__all__ = [
    "AdamState",
    "CHECKPOINT_MAGIC",
    "DiffTensor",
    "adam_step",
    "add",
    "avg_pool_freq",
    "backward",
    "concat",
    "concat_last_dim",
    "conv1d_freq_forward",
    "conv2d_forward",
    "grad_check",
    "grad_check_params",
    "init_adam",
    "linear_forward",
    "load_checkpoint",
    "lstm_forward",
    "lstm_layer_param_shapes",
    "make_op",
    "mean",
    "mul",
    "narrow",
    "permute",
    "pointwise",
    "relu",
    "reshape",
    "save_checkpoint",
    "scale",
    "sigmoid",
    "stack",
    "sub",
    "take_rows",
    "tanh",
    "tensor_sum",
    "zero_grad",
]
