"""Full-band backbone: whole-spectrum recurrence producing a per-bin embedding."""

from ..diffcore import DiffTensor, linear_forward, lstm_forward, permute, relu
from ..errors import ShapeError

PARAM_PREFIX = "gfull"


def g_full_param_shapes(cfg) -> dict:
    f, hidden = cfg.f_bins, cfg.full_hidden
    shapes = {}
    for layer, d_in in ((1, f), (2, hidden)):
        shapes[f"{PARAM_PREFIX}.lstm{layer}.w_ih"] = (4 * hidden, d_in)
        shapes[f"{PARAM_PREFIX}.lstm{layer}.w_hh"] = (4 * hidden, hidden)
        shapes[f"{PARAM_PREFIX}.lstm{layer}.b_ih"] = (4 * hidden,)
        shapes[f"{PARAM_PREFIX}.lstm{layer}.b_hh"] = (4 * hidden,)
    shapes[f"{PARAM_PREFIX}.fc.weight"] = (f, hidden)
    shapes[f"{PARAM_PREFIX}.fc.bias"] = (f,)
    return shapes


def g_full_forward(x: DiffTensor, params: dict, hidden: int) -> DiffTensor:
    """[F, T] -> embedding [F, T], one non-negative element per bin and frame."""
    if x.data.ndim != 2:
        raise ShapeError(f"g_full_forward: input must be [F, T], got {x.shape}")
    f, _ = x.shape
    if params[f"{PARAM_PREFIX}.lstm1.w_ih"].shape[1] != f:
        raise ShapeError(
            f"g_full_forward: parameters sized for "
            f"{params[f'{PARAM_PREFIX}.lstm1.w_ih'].shape[1]} bins, input has {f}"
        )
    lstm_params = [
        {k: params[f"{PARAM_PREFIX}.lstm{layer}.{k}"]
         for k in ("w_ih", "w_hh", "b_ih", "b_hh")}
        for layer in (1, 2)
    ]
    out, _ = lstm_forward(permute(x, (1, 0)), 2, hidden, lstm_params)  # [T, hidden]
    emb = relu(linear_forward(out, params[f"{PARAM_PREFIX}.fc.weight"],
                              params[f"{PARAM_PREFIX}.fc.bias"]))
    return permute(emb, (1, 0))
