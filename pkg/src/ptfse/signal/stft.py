"""Short-time Fourier analysis and overlap-add synthesis.

Analysis uses a periodic Hann window and center padding (n_fft/2 zeros on
both ends), so frame t is centered on sample t*hop. Synthesis divides the
overlap-added, re-windowed frames by the accumulated squared-window
envelope, which inverts the analysis exactly wherever the envelope is
bounded away from zero.
"""

import numpy as np

from ..errors import InvalidInputError
from .types import ComplexSpectrogram, Waveform


def periodic_hann(n_fft: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft)


def num_frames(n_samples: int, n_fft: int, hop: int) -> int:
    padded = n_samples + n_fft
    return 1 + (padded - n_fft) // hop


def stft(w: Waveform, n_fft: int, hop: int) -> ComplexSpectrogram:
    """Analyze a waveform into a one-sided complex spectrogram.

    n_fft must be even and divisible by hop; the waveform must hold at
    least one frame. Linear in the input.
    """
    if n_fft % 2 != 0:
        raise InvalidInputError(f"n_fft must be even, got {n_fft}")
    if hop <= 0 or n_fft % hop != 0:
        raise InvalidInputError(f"hop must divide n_fft, got hop={hop}, n_fft={n_fft}")
    x = w.samples
    if x.size < n_fft:
        raise InvalidInputError(
            f"waveform of {x.size} samples is shorter than one frame ({n_fft})"
        )
    pad = n_fft // 2
    padded = np.concatenate([np.zeros(pad), x, np.zeros(pad)])
    frames_count = 1 + (padded.size - n_fft) // hop
    window = periodic_hann(n_fft)

    offsets = np.arange(frames_count) * hop
    idx = offsets[:, None] + np.arange(n_fft)[None, :]
    spec = np.fft.rfft(padded[idx] * window, axis=1).T  # (F, T)
    return ComplexSpectrogram(spec.real, spec.imag, n_fft=n_fft, hop=hop)


def synthesizable_length(spec: ComplexSpectrogram) -> int:
    """Longest output istft can produce from this grid."""
    return (spec.num_frames - 1) * spec.hop + spec.n_fft // 2


def istft(spec: ComplexSpectrogram, out_len: int, sample_rate: int = 16000) -> Waveform:
    """Overlap-add synthesis with squared-window normalization."""
    n_fft, hop = spec.n_fft, spec.hop
    pad = n_fft // 2
    max_len = synthesizable_length(spec)
    if out_len <= 0 or out_len > max_len:
        raise InvalidInputError(
            f"requested {out_len} samples but only {max_len} are synthesizable"
        )
    window = periodic_hann(n_fft)
    frames = np.fft.irfft(spec.as_complex().T, n=n_fft, axis=1)  # (T, n_fft)
    frames *= window

    total = (spec.num_frames - 1) * hop + n_fft
    out = np.zeros(total)
    envelope = np.zeros(total)
    wsq = window * window
    for t in range(spec.num_frames):
        lo = t * hop
        out[lo : lo + n_fft] += frames[t]
        envelope[lo : lo + n_fft] += wsq

    lo, hi = pad, pad + out_len
    return Waveform(out[lo:hi] / envelope[lo:hi], sample_rate)
