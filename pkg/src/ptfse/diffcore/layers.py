"""Differentiable layer primitives built on DiffTensor.

Everything here registers exact backward closures; the LSTM is the one
layer composed from the pointwise primitives instead (its backward then
comes for free from the graph).
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import InvalidConfigError, ShapeError
from .tensor import DiffTensor, add, make_op, mul, narrow, reshape, sigmoid, stack, tanh


def linear_forward(x: DiffTensor, weight: DiffTensor, bias=None) -> DiffTensor:
    """out = x @ weight.T + bias over the last axis of x."""
    d_out, d_in = weight.shape
    if x.shape[-1] != d_in:
        raise ShapeError(
            f"linear_forward: input {x.shape} does not match weight {weight.shape}"
        )
    if bias is not None and bias.shape != (d_out,):
        raise ShapeError(
            f"linear_forward: bias {bias.shape} does not match weight {weight.shape}"
        )
    out = x.data @ weight.data.T
    if bias is not None:
        out = out + bias.data

    def bwd(g):
        g2 = g.reshape(-1, d_out)
        x2 = x.data.reshape(-1, d_in)
        dx = (g2 @ weight.data).reshape(x.shape)
        dw = g2.T @ x2
        if bias is None:
            return dx, dw
        return dx, dw, g2.sum(axis=0)

    parents = (x, weight) if bias is None else (x, weight, bias)
    return make_op(out, parents, bwd, "linear")


def conv1d_freq_forward(x: DiffTensor, kernels: DiffTensor, bias=None) -> DiffTensor:
    """Cross-correlation along the frequency axis with zero same-padding.

    x is [C_in, F] or [C_in, F, T]; kernels is [C_out, C_in, k] with k odd.
    A trailing time axis is carried through untouched.
    """
    c_out, c_in, k = kernels.shape
    if k % 2 == 0:
        raise InvalidConfigError(f"conv1d_freq_forward: kernel size {k} must be odd")
    if x.data.ndim not in (2, 3) or x.shape[0] != c_in:
        raise ShapeError(
            f"conv1d_freq_forward: input {x.shape} does not match kernels {kernels.shape}"
        )
    pad = k // 2
    f_bins = x.shape[1]
    pad_spec = ((0, 0), (pad, pad)) + (((0, 0),) if x.data.ndim == 3 else ())
    xpad = np.pad(x.data, pad_spec)
    # windows: [C_in, F, k] or [C_in, F, T, k]
    win = sliding_window_view(xpad, k, axis=1)
    if x.data.ndim == 2:
        out = np.einsum("cfk,ock->of", win, kernels.data)
        bias_shape = (c_out, 1)
    else:
        out = np.einsum("cftk,ock->oft", win, kernels.data)
        bias_shape = (c_out, 1, 1)
    if bias is not None:
        if bias.shape != (c_out,):
            raise ShapeError(f"conv1d_freq_forward: bias {bias.shape}, want ({c_out},)")
        out = out + bias.data.reshape(bias_shape)

    def bwd(g):
        if x.data.ndim == 2:
            dk = np.einsum("cfk,of->ock", win, g)
        else:
            dk = np.einsum("cftk,oft->ock", win, g)
        dxpad = np.zeros_like(xpad)
        for j in range(k):
            if x.data.ndim == 2:
                dxpad[:, j:j + f_bins] += np.einsum("oc,of->cf", kernels.data[:, :, j], g)
            else:
                dxpad[:, j:j + f_bins] += np.einsum("oc,oft->cft", kernels.data[:, :, j], g)
        dx = dxpad[:, pad:pad + f_bins]
        if bias is None:
            return dx, dk
        db = g.sum(axis=tuple(range(1, g.ndim)))
        return dx, dk, db

    parents = (x, kernels) if bias is None else (x, kernels, bias)
    return make_op(out, parents, bwd, "conv1d_freq")


def conv2d_forward(x: DiffTensor, kernels: DiffTensor, bias=None) -> DiffTensor:
    """2-D cross-correlation with zero same-padding.

    x is [C_in, F, T]; kernels is [C_out, C_in, kf, kt], both kernel dims odd.
    The model only instantiates 1x1 kernels (per-position channel mixes).
    """
    c_out, c_in, kf, kt = kernels.shape
    if kf % 2 == 0 or kt % 2 == 0:
        raise InvalidConfigError(f"conv2d_forward: kernel dims ({kf},{kt}) must be odd")
    if x.data.ndim != 3 or x.shape[0] != c_in:
        raise ShapeError(
            f"conv2d_forward: input {x.shape} does not match kernels {kernels.shape}"
        )
    pf, pt = kf // 2, kt // 2
    f_bins, t_frames = x.shape[1], x.shape[2]
    xpad = np.pad(x.data, ((0, 0), (pf, pf), (pt, pt)))
    win = sliding_window_view(xpad, (kf, kt), axis=(1, 2))  # [C_in, F, T, kf, kt]
    out = np.einsum("cftuv,ocuv->oft", win, kernels.data)
    if bias is not None:
        if bias.shape != (c_out,):
            raise ShapeError(f"conv2d_forward: bias {bias.shape}, want ({c_out},)")
        out = out + bias.data.reshape(c_out, 1, 1)

    def bwd(g):
        dk = np.einsum("cftuv,oft->ocuv", win, g)
        dxpad = np.zeros_like(xpad)
        for u in range(kf):
            for v in range(kt):
                dxpad[:, u:u + f_bins, v:v + t_frames] += np.einsum(
                    "oc,oft->cft", kernels.data[:, :, u, v], g
                )
        dx = dxpad[:, pf:pf + f_bins, pt:pt + t_frames]
        if bias is None:
            return dx, dk
        return dx, dk, g.sum(axis=(1, 2))

    parents = (x, kernels) if bias is None else (x, kernels, bias)
    return make_op(out, parents, bwd, "conv2d")


def lstm_layer_param_shapes(d_in: int, hidden: int) -> dict:
    """Shapes for one layer's parameter dict, gate order (in, forget, cell, out)."""
    return {
        "w_ih": (4 * hidden, d_in),
        "w_hh": (4 * hidden, hidden),
        "b_ih": (4 * hidden,),
        "b_hh": (4 * hidden,),
    }


def _lstm_cell(xt, h_prev, c_prev, layer_params, hidden):
    gates = add(
        linear_forward(xt, layer_params["w_ih"], layer_params["b_ih"]),
        linear_forward(h_prev, layer_params["w_hh"], layer_params["b_hh"]),
    )
    i_gate = sigmoid(narrow(gates, -1, 0, hidden))
    f_gate = sigmoid(narrow(gates, -1, hidden, hidden))
    g_cand = tanh(narrow(gates, -1, 2 * hidden, hidden))
    o_gate = sigmoid(narrow(gates, -1, 3 * hidden, hidden))
    c_new = add(mul(f_gate, c_prev), mul(i_gate, g_cand))
    h_new = mul(o_gate, tanh(c_new))
    return h_new, c_new


def lstm_forward(x: DiffTensor, layers: int, hidden: int, params):
    """Stacked unidirectional LSTM with zero initial state.

    x is [T, d_in] for one sequence or [B, T, d_in] for a batch of
    independent sequences. params is a sequence of per-layer dicts with
    keys w_ih, w_hh, b_ih, b_hh (see lstm_layer_param_shapes).
    Returns (outputs, last_hidden): [T, hidden] and [hidden], or the
    batched equivalents with a leading B.
    """
    if len(params) != layers:
        raise ShapeError(f"lstm_forward: {len(params)} param sets for {layers} layers")
    single = x.data.ndim == 2
    if single:
        x = reshape(x, (1,) + x.shape)
    if x.data.ndim != 3:
        raise ShapeError(f"lstm_forward: input must be [T, d] or [B, T, d], got {x.shape}")
    batch, t_frames, d_in = x.shape
    for li, lp in enumerate(params):
        want = lstm_layer_param_shapes(d_in if li == 0 else hidden, hidden)
        for key, shape in want.items():
            if lp[key].shape != shape:
                raise ShapeError(
                    f"lstm_forward: layer {li} {key} has shape {lp[key].shape}, want {shape}"
                )

    steps = [
        reshape(narrow(x, 1, t, 1), (batch, d_in)) for t in range(t_frames)
    ]
    for li in range(layers):
        zeros = DiffTensor(np.zeros((batch, hidden), dtype=x.dtype))
        h_prev, c_prev = zeros, zeros
        outputs = []
        for xt in steps:
            h_prev, c_prev = _lstm_cell(xt, h_prev, c_prev, params[li], hidden)
            outputs.append(h_prev)
        steps = outputs
    out = stack(steps, axis=1)  # [B, T, hidden]
    last = steps[-1]
    if single:
        out = reshape(out, (t_frames, hidden))
        last = reshape(last, (hidden,))
    return out, last


def avg_pool_freq(x: DiffTensor, step: int, axis: int = -1) -> DiffTensor:
    """Non-overlapping mean over consecutive groups of `step` bins."""
    step = int(step)
    if step < 1:
        raise InvalidConfigError(f"avg_pool_freq: step {step} must be >= 1")
    ax = axis % x.data.ndim
    width = x.shape[ax]
    if width % step != 0:
        raise InvalidConfigError(
            f"avg_pool_freq: width {width} not divisible by step {step}"
        )
    if step == 1:
        return make_op(x.data.copy(), (x,), lambda g: (g,), "avg_pool1")
    moved = np.moveaxis(x.data, ax, -1)
    grouped_shape = moved.shape[:-1] + (width // step, step)
    out_moved = moved.reshape(grouped_shape).mean(axis=-1)
    out = np.moveaxis(out_moved, -1, ax)

    def bwd(g):
        g_moved = np.moveaxis(g, ax, -1)
        spread = np.repeat(g_moved[..., None], step, axis=-1) / step
        return (np.moveaxis(spread.reshape(moved.shape), -1, ax),)

    return make_op(out, (x,), bwd, "avg_pool")
