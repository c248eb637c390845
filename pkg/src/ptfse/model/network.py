"""Network assembly: initialization, forward pass, counting, latency.

Parameter dicts are flat, keyed "block.layer.tensor" (for example
"gsub.lstm1.w_ih"), which is also the name scheme inside checkpoints.
"""

import numpy as np

from ..diffcore import DiffTensor, take_rows
from ..errors import ContractError, InvalidInputError, ShapeError
from ..signal import MagnitudeSpectrogram
from .config import ModelConfig
from .ftrans import f_trans_forward, f_trans_param_shapes
from .fullband import g_full_forward, g_full_param_shapes
from .subband import SubbandInput, g_sub_forward, g_sub_param_shapes, subband_unfold
from .ttrans import t_trans_forward, t_trans_param_shapes

FORGET_GATE_BIAS = 1.0


def param_shapes(cfg: ModelConfig) -> dict:
    """Name -> shape for every trainable tensor the config enables."""
    shapes = {}
    if cfg.enable_f_trans:
        shapes.update(f_trans_param_shapes(cfg))
    if cfg.enable_t_trans:
        shapes.update(t_trans_param_shapes(cfg))
    shapes.update(g_full_param_shapes(cfg))
    shapes.update(g_sub_param_shapes(cfg))
    return shapes


def _fan_in(name: str, shape: tuple) -> int:
    if len(shape) == 2:
        return shape[1]
    if len(shape) >= 3:  # conv kernels: receptive field times input channels
        n = 1
        for d in shape[1:]:
            n *= d
        return n
    raise InvalidInputError(f"no fan-in rule for {name} with shape {shape}")


def init_params(cfg: ModelConfig, seed: int = 0) -> dict:
    """Seeded initialization: weights U[-1/sqrt(fan_in), +1/sqrt(fan_in)],
    zero biases, LSTM forget-gate bias +1 (in the input-side bias)."""
    rng = np.random.default_rng(seed)
    params = {}
    for name, shape in param_shapes(cfg).items():
        leaf = name.rsplit(".", 1)[1]
        if leaf in ("bias", "b_hh"):
            values = np.zeros(shape, dtype=np.float32)
        elif leaf == "b_ih":
            values = np.zeros(shape, dtype=np.float32)
            hidden = shape[0] // 4
            values[hidden:2 * hidden] = FORGET_GATE_BIAS
        else:
            bound = 1.0 / np.sqrt(_fan_in(name, shape))
            values = rng.uniform(-bound, bound, size=shape).astype(np.float32)
        params[name] = DiffTensor(values, requires_grad=True)
    return params


def check_params_match(cfg: ModelConfig, params: dict) -> None:
    """Raise ContractError naming every name/shape disagreement."""
    expected = param_shapes(cfg)
    problems = []
    for name, shape in expected.items():
        if name not in params:
            problems.append(f"missing {name} {shape}")
        else:
            have = tuple(params[name].shape)
            if have != shape:
                problems.append(f"{name}: checkpoint {have} vs config {shape}")
    for name in params:
        if name not in expected:
            problems.append(f"unexpected {name}")
    if problems:
        raise ContractError(
            "checkpoint does not fit the configuration: " + "; ".join(sorted(problems))
        )


def _lift_input(x, params: dict) -> DiffTensor:
    if isinstance(x, DiffTensor):
        return x
    if isinstance(x, MagnitudeSpectrogram):
        x = x.values
    dtype = next(iter(params.values())).dtype if params else np.float32
    return DiffTensor(np.asarray(x, dtype=dtype))


def pt_fse_forward(x, cfg: ModelConfig, params: dict, bins=None) -> DiffTensor:
    """Magnitudes [F, T] -> compressed-domain mask planes [2, F, T].

    x may be a MagnitudeSpectrogram, ndarray, or DiffTensor. With `bins`
    (ascending original-grid indices), only those bins' sub-band sequences
    are run and the mask comes back as [2, len(bins), T]; the full-band
    path always sees the whole spectrum.
    """
    x = _lift_input(x, params)
    if x.data.ndim != 2 or x.shape[0] != cfg.f_bins:
        raise ShapeError(
            f"pt_fse_forward: want [{cfg.f_bins}, T] magnitudes, got {x.shape}"
        )
    if x.shape[1] <= cfg.tau:
        raise InvalidInputError(
            f"pt_fse_forward: {x.shape[1]} frames cannot honor a "
            f"{cfg.tau}-frame look-ahead"
        )
    m = x
    if cfg.enable_f_trans:
        m = f_trans_forward(m, params)
    if cfg.enable_t_trans:
        m = t_trans_forward(m, params, cfg.ttrans_hidden)
    embedding = g_full_forward(m, params, cfg.full_hidden)
    z = subband_unfold(m, embedding, cfg.context)
    if bins is not None:
        z = SubbandInput(sequences=take_rows(z.sequences, bins), context=cfg.context)
    return g_sub_forward(z, params, cfg.sub_hidden, cfg.tau)


PARAM_COUNT_VARIANTS = ("baseline", "+f_trans", "+t_trans", "full")


def param_count(cfg: ModelConfig, which=None) -> int:
    """Trainable scalars, optionally for a named ablation variant."""
    if which is not None:
        cfg = cfg.with_variant(which)
    return sum(int(np.prod(s)) for s in param_shapes(cfg).values())


def param_breakdown(cfg: ModelConfig) -> dict:
    """Trainable scalars per block ("ftrans", "ttrans", "gfull", "gsub")."""
    counts = {}
    for name, shape in param_shapes(cfg).items():
        block = name.split(".", 1)[0]
        counts[block] = counts.get(block, 0) + int(np.prod(shape))
    return counts


def look_ahead_samples(cfg: ModelConfig) -> int:
    """Algorithmic latency: the mask for a frame waits for tau more hops."""
    return cfg.tau * cfg.hop


def look_ahead_ms(cfg: ModelConfig, sample_rate: int = 16000) -> float:
    return 1000.0 * look_ahead_samples(cfg) / sample_rate
