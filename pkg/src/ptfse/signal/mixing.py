"""SNR-controlled additive mixing."""

import numpy as np

from ..errors import InvalidInputError
from .types import Waveform


def power(w: Waveform) -> float:
    return float(np.mean(w.samples**2))


def measured_snr_db(clean: Waveform, noise: Waveform) -> float:
    return 10.0 * np.log10(power(clean) / power(noise))


def mix_at_snr(clean: Waveform, noise: Waveform, snr_db: float):
    """Scale `noise` so clean-to-noise power ratio is snr_db, then add.

    Returns (mixture, scaled_noise).
    """
    if len(clean) != len(noise):
        raise InvalidInputError(
            f"clean ({len(clean)}) and noise ({len(noise)}) lengths differ"
        )
    if clean.sample_rate != noise.sample_rate:
        raise InvalidInputError(
            f"sample rates differ: {clean.sample_rate} vs {noise.sample_rate}"
        )
    p_clean, p_noise = power(clean), power(noise)
    if p_clean == 0.0:
        raise InvalidInputError("clean signal has zero power")
    if p_noise == 0.0:
        raise InvalidInputError("noise signal has zero power")

    scale = np.sqrt(p_clean / (p_noise * 10.0 ** (snr_db / 10.0)))
    scaled = Waveform(noise.samples * scale, noise.sample_rate)
    mixture = Waveform(clean.samples + scaled.samples, clean.sample_rate)
    return mixture, scaled
