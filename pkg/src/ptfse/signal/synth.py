"""Deterministic synthetic clip generation.

A desk-scale stand-in for a recorded corpus: harmonic "speechlike" clips
with slow amplitude and pitch modulation, plus white / pink / babble
interference. Every kind is a pure function of (kind, seconds, seed).
"""

import numpy as np

from ..errors import InvalidInputError
from .types import PIPELINE_SAMPLE_RATE, Waveform

CLIP_KINDS = ("speechlike", "noise_white", "noise_pink", "noise_babble")


def synth_clip(kind: str, seconds: float, seed: int) -> Waveform:
    if seconds <= 0:
        raise InvalidInputError(f"seconds must be positive, got {seconds}")
    if kind not in CLIP_KINDS:
        raise InvalidInputError(f"kind must be one of {CLIP_KINDS}, got {kind!r}")
    fs = PIPELINE_SAMPLE_RATE
    n = int(round(seconds * fs))
    rng = np.random.default_rng(seed)

    if kind == "noise_white":
        x = rng.standard_normal(n) * 0.2
    elif kind == "noise_pink":
        x = _pink(n, rng) * 0.2
    elif kind == "speechlike":
        x = _voice(n, fs, rng)
    else:  # babble: several desynchronized voices summed
        x = np.zeros(n)
        for _ in range(6):
            x += _voice(n, fs, rng)
        x /= 6.0

    peak = np.max(np.abs(x))
    if peak > 0.999:
        x = x * (0.999 / peak)
    return Waveform(x, fs)


def _pink(n: int, rng) -> np.ndarray:
    """Spectrally shaped noise with 1/f power (-3 dB per octave)."""
    white = rng.standard_normal(n)
    spec = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, d=1.0)
    shaping = np.ones_like(freqs)
    shaping[1:] = 1.0 / np.sqrt(freqs[1:])
    shaping[0] = 0.0  # no DC
    x = np.fft.irfft(spec * shaping, n=n)
    return x / np.std(x)


def _voice(n: int, fs: int, rng) -> np.ndarray:
    """Sum of 3-5 harmonics of a slowly wobbling fundamental, slow AM."""
    t = np.arange(n) / fs
    f0 = rng.uniform(110.0, 220.0)
    vibrato_hz = rng.uniform(3.0, 6.0)
    vibrato_depth = rng.uniform(0.01, 0.03)
    inst_f0 = f0 * (1.0 + vibrato_depth * np.sin(2 * np.pi * vibrato_hz * t + rng.uniform(0, 2 * np.pi)))
    phase = 2 * np.pi * np.cumsum(inst_f0) / fs

    num_harmonics = int(rng.integers(3, 6))
    x = np.zeros(n)
    for k in range(1, num_harmonics + 1):
        amp = 1.0 / k
        trem_hz = rng.uniform(1.5, 5.0)
        trem = 0.55 + 0.45 * np.sin(2 * np.pi * trem_hz * t + rng.uniform(0, 2 * np.pi))
        x += amp * trem * np.sin(k * phase + rng.uniform(0, 2 * np.pi))

    # syllable-rate energy contour keeps envelopes informative
    syllable_hz = rng.uniform(2.0, 4.0)
    contour = 0.6 + 0.4 * np.sin(2 * np.pi * syllable_hz * t + rng.uniform(0, 2 * np.pi))
    x *= contour
    return 0.4 * x / np.max(np.abs(x))
