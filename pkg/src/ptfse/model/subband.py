"""Sub-band input assembly and the per-frequency recurrent mask predictor.

Each frequency bin gets its own input sequence: the bin's magnitude with N
neighbors per side (indices wrap circularly at the spectrum edges) plus
that bin's full-band embedding element. One shared two-layer LSTM and a
two-unit head run over every sequence independently and emit the two mask
planes.

The head's output at sequence position t is read as the mask for frame
t - tau, so a mask frame may look tau frames ahead. Alignment extends the
input with tau copies of its final frame and drops the first tau outputs,
which keeps the output grid as wide as the input.
"""

from dataclasses import dataclass

import numpy as np

from ..diffcore import (
    DiffTensor,
    concat,
    linear_forward,
    lstm_forward,
    make_op,
    narrow,
    permute,
)
from ..errors import InvalidConfigError, InvalidInputError, ShapeError

PARAM_PREFIX = "gsub"


@dataclass
class SubbandInput:
    """F independent sequences over time, each frame a (2N+2)-vector."""

    sequences: DiffTensor  # [F, T, 2N+2]
    context: int

    @property
    def num_bins(self) -> int:
        return self.sequences.shape[0]

    @property
    def num_frames(self) -> int:
        return self.sequences.shape[1]


def subband_unfold(x: DiffTensor, embedding: DiffTensor, context: int) -> SubbandInput:
    """Gather per-bin neighborhoods and append the embedding element.

    x and embedding are [F, T]; the result stacks, for every bin f, the
    magnitudes at bins f-N..f+N (circular wrap) and embedding[f] into a
    [F, T, 2N+2] tensor. Pure rearrangement: the backward pass scatters
    gradients back to the source bins.
    """
    if x.shape != embedding.shape or x.data.ndim != 2:
        raise ShapeError(
            f"subband_unfold: need matching [F, T] grids, got {x.shape} "
            f"and {embedding.shape}"
        )
    f_bins, t_frames = x.shape
    n = int(context)
    if n < 0:
        raise InvalidConfigError(f"subband_unfold: context {n} must be >= 0")
    if n >= f_bins:
        raise InvalidConfigError(
            f"subband_unfold: context {n} must be smaller than the bin count {f_bins}"
        )
    idx = (np.arange(f_bins)[:, None] + np.arange(-n, n + 1)[None, :]) % f_bins
    flat_idx = idx.reshape(-1)

    def fwd(x_data, emb_data):
        gathered = x_data[idx]                       # [F, 2N+1, T]
        neighbors = gathered.transpose(0, 2, 1)      # [F, T, 2N+1]
        return np.concatenate([neighbors, emb_data[:, :, None]], axis=2)

    def bwd(g):
        g_neighbors = g[:, :, :2 * n + 1].transpose(0, 2, 1)  # [F, 2N+1, T]
        dx = np.zeros((f_bins, t_frames), dtype=g.dtype)
        np.add.at(dx, flat_idx, g_neighbors.reshape(-1, t_frames))
        return dx, g[:, :, -1]

    node = make_op(fwd(x.data, embedding.data), (x, embedding), bwd, "subband_unfold")
    return SubbandInput(sequences=node, context=n)


def g_sub_param_shapes(cfg) -> dict:
    width, hidden = cfg.subband_width, cfg.sub_hidden
    shapes = {}
    for layer, d_in in ((1, width), (2, hidden)):
        shapes[f"{PARAM_PREFIX}.lstm{layer}.w_ih"] = (4 * hidden, d_in)
        shapes[f"{PARAM_PREFIX}.lstm{layer}.w_hh"] = (4 * hidden, hidden)
        shapes[f"{PARAM_PREFIX}.lstm{layer}.b_ih"] = (4 * hidden,)
        shapes[f"{PARAM_PREFIX}.lstm{layer}.b_hh"] = (4 * hidden,)
    shapes[f"{PARAM_PREFIX}.fc.weight"] = (2, hidden)
    shapes[f"{PARAM_PREFIX}.fc.bias"] = (2,)
    return shapes


def g_sub_forward(z: SubbandInput, params: dict, hidden: int, tau: int) -> DiffTensor:
    """[F, T, 2N+2] sequences -> compressed-domain mask planes [2, F, T]."""
    seq = z.sequences
    f_bins, t_frames, width = seq.shape
    if params[f"{PARAM_PREFIX}.lstm1.w_ih"].shape[1] != width:
        raise ShapeError(
            f"g_sub_forward: parameters take width "
            f"{params[f'{PARAM_PREFIX}.lstm1.w_ih'].shape[1]}, sequences have {width}"
        )
    if t_frames <= tau:
        raise InvalidInputError(
            f"g_sub_forward: {t_frames} frames cannot honor a {tau}-frame look-ahead"
        )
    if tau > 0:
        tail = narrow(seq, 1, t_frames - 1, 1)  # [F, 1, width]
        seq = concat([seq] + [tail] * tau, axis=1)
    lstm_params = [
        {k: params[f"{PARAM_PREFIX}.lstm{layer}.{k}"]
         for k in ("w_ih", "w_hh", "b_ih", "b_hh")}
        for layer in (1, 2)
    ]
    out, _ = lstm_forward(seq, 2, hidden, lstm_params)  # [F, T+tau, hidden]
    aligned = narrow(out, 1, tau, t_frames) if tau > 0 else out
    mask = linear_forward(aligned, params[f"{PARAM_PREFIX}.fc.weight"],
                          params[f"{PARAM_PREFIX}.fc.bias"])  # [F, T, 2]
    return permute(mask, (2, 0, 1))
