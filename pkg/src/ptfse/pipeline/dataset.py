"""Dynamic mixing of clean/noise pools and the strided frequency-drop
selection used to thin the per-step loss."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InvalidConfigError, InvalidInputError
from ..signal import (PIPELINE_SAMPLE_RATE, ComplexSpectrogram,
                      MagnitudeSpectrogram, Waveform, magnitude, mix_at_snr,
                      read_wav, stft)


@dataclass
class MixItem:
    """One training example: mixture spectra plus its mixing metadata."""
    noisy_mag: MagnitudeSpectrogram
    noisy_spec: ComplexSpectrogram
    clean_spec: ComplexSpectrogram
    clean_id: str
    noise_id: str
    snr_db: float


def load_pool(directory):
    """Sorted list of (clip id, Waveform) for every WAV under `directory`."""
    directory = Path(directory)
    if not directory.is_dir():
        raise InvalidConfigError(f"clip pool directory not found: {directory}")
    return [(path.stem, read_wav(path)) for path in sorted(directory.glob("*.wav"))]


def _entry(pool, index):
    item = pool[index]
    if isinstance(item, Waveform):
        return str(index), item
    clip_id, w = item
    return str(clip_id), w


def _crop(w: Waveform, n_samples: int, rng, clip_id: str) -> Waveform:
    if len(w) < n_samples:
        raise InvalidInputError(
            f"clip {clip_id!r} has {len(w)} samples, need {n_samples}"
        )
    slack = len(w) - n_samples
    start = int(rng.integers(0, slack + 1)) if slack else 0
    return Waveform(w.samples[start:start + n_samples], w.sample_rate)


def dynamic_mix_batch(clean_pool, noise_pool, cfg, rng,
                      n_fft: int = 512, hop: int = 256):
    """Draw `cfg.batch_size` fresh mixtures from the two pools.

    Per item the draws are, in order: clean index, noise index, SNR
    (uniform over cfg.snr_range_db), then crop offsets. Reproducible
    given the generator state. Pools hold (id, Waveform) pairs or bare
    Waveforms.
    """
    if len(clean_pool) == 0 or len(noise_pool) == 0:
        raise InvalidConfigError(
            f"dynamic_mix_batch: empty pool (clean={len(clean_pool)}, "
            f"noise={len(noise_pool)})"
        )
    lo, hi = float(cfg.snr_range_db[0]), float(cfg.snr_range_db[1])
    n_samples = int(round(cfg.clip_seconds * PIPELINE_SAMPLE_RATE))
    batch = []
    for _ in range(cfg.batch_size):
        ci = int(rng.integers(0, len(clean_pool)))
        ni = int(rng.integers(0, len(noise_pool)))
        snr_db = float(rng.uniform(lo, hi))
        clean_id, clean = _entry(clean_pool, ci)
        noise_id, noise = _entry(noise_pool, ni)
        clean = _crop(clean, n_samples, rng, clean_id)
        noise = _crop(noise, n_samples, rng, noise_id)
        noisy, _ = mix_at_snr(clean, noise, snr_db)
        noisy_spec = stft(noisy, n_fft, hop)
        clean_spec = stft(clean, n_fft, hop)
        batch.append(MixItem(
            noisy_mag=magnitude(noisy_spec),
            noisy_spec=noisy_spec,
            clean_spec=clean_spec,
            clean_id=clean_id,
            noise_id=noise_id,
            snr_db=snr_db,
        ))
    return batch


def drop_band_select(f_bins: int, groups: int, rng):
    """Every groups-th frequency index starting from a random offset.

    groups=1 keeps everything. The union over all offsets covers the
    full grid (residue classes modulo `groups`).
    """
    if groups < 1 or groups > f_bins:
        raise InvalidConfigError(
            f"drop_band_select: groups must be in [1, {f_bins}], got {groups}"
        )
    offset = int(rng.integers(0, groups))
    return list(range(offset, f_bins, groups))
