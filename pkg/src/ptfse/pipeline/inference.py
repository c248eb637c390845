"""File-to-file enhancement: spectrogram in, masked spectrogram out."""

from pathlib import Path

import numpy as np

from ..diffcore import DiffTensor, load_checkpoint
from ..errors import InvalidInputError
from ..masking import ComplexMask, apply_mask, decompress_mask
from ..model import ModelConfig, check_params_match, pt_fse_forward
from ..signal import PIPELINE_SAMPLE_RATE, Waveform, istft, magnitude, stft


def load_params(checkpoint, cfg: ModelConfig) -> dict:
    """Checkpoint path or name->array dict, validated against `cfg`.

    Raises ContractError listing every shape disagreement.
    """
    if isinstance(checkpoint, (str, Path)):
        checkpoint = load_checkpoint(checkpoint)
    params = {name: DiffTensor(values) for name, values in checkpoint.items()}
    check_params_match(cfg, params)
    return params


def enhance(noisy: Waveform, checkpoint, cfg: ModelConfig) -> Waveform:
    """Denoise one waveform with a trained model.

    The chain is stft -> magnitude -> mask prediction -> decompress ->
    apply -> istft. Output length equals input length; the mask for
    frame m only sees input up to frame m + tau, so algorithmic latency
    is exactly tau * hop samples.
    """
    if noisy.sample_rate != PIPELINE_SAMPLE_RATE:
        raise InvalidInputError(
            f"enhance expects {PIPELINE_SAMPLE_RATE} Hz input, got "
            f"{noisy.sample_rate}"
        )
    params = load_params(checkpoint, cfg)
    spec = stft(noisy, cfg.n_fft, cfg.hop)
    planes = pt_fse_forward(magnitude(spec), cfg, params).data
    mask = decompress_mask(ComplexMask(planes[0], planes[1], compressed=True))
    est_spec = apply_mask(spec, mask)
    out = istft(est_spec, out_len=len(noisy), sample_rate=noisy.sample_rate)
    if not np.all(np.isfinite(out.samples)):
        raise InvalidInputError("enhance produced non-finite samples")
    return out
