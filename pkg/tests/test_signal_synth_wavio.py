"""Synthetic corpus generation, SNR mixing, and WAV round trips."""

import struct

import numpy as np
import pytest

from ptfse.errors import InvalidInputError, UnsupportedFormatError
from ptfse.signal import (CLIP_KINDS, Waveform, measured_snr_db, mix_at_snr,
                          read_wav, synth_clip, write_wav)

from conftest import random_waveform


def test_synth_deterministic():
    a = synth_clip("speechlike", 2.0, seed=7)
    b = synth_clip("speechlike", 2.0, seed=7)
    assert np.array_equal(a.samples, b.samples)
    c = synth_clip("speechlike", 2.0, seed=8)
    assert not np.array_equal(a.samples, c.samples)


def test_synth_lengths_and_kinds():
    for kind in CLIP_KINDS:
        w = synth_clip(kind, 0.5, seed=1)
        assert len(w) == 8000
        assert w.sample_rate == 16000
        assert np.max(np.abs(w.samples)) <= 1.0
    with pytest.raises(InvalidInputError):
        synth_clip("speechlike", 0.0, seed=1)
    with pytest.raises(InvalidInputError):
        synth_clip("chirp", 1.0, seed=1)


def test_white_noise_mean_near_zero():
    w = synth_clip("noise_white", 1.0, seed=1)
    assert abs(np.mean(w.samples)) <= 0.01


def test_pink_noise_slope():
    """Log-power vs log2(frequency) regression slope ~ -3 dB/octave."""
    w = synth_clip("noise_pink", 1.0, seed=1)
    spec = np.fft.rfft(w.samples)
    freqs = np.fft.rfftfreq(len(w), d=1.0 / 16000)
    band = (freqs >= 100) & (freqs <= 4000)
    octaves = np.log2(freqs[band])
    power_db = 10.0 * np.log10(np.abs(spec[band]) ** 2)
    slope = np.polyfit(octaves, power_db, 1)[0]
    assert abs(slope - (-3.0)) <= 1.0


def test_mix_scale_hand_cases():
    """Equal powers at 0 dB keep the noise as is; 4x power halves it."""
    clean = Waveform(np.ones(100), 16000)
    noise = Waveform(np.concatenate([np.ones(50), -np.ones(50)]), 16000)
    _, scaled = mix_at_snr(clean, noise, 0.0)
    np.testing.assert_allclose(np.abs(scaled.samples), 1.0, atol=1e-12)
    noise4 = Waveform(2.0 * noise.samples, 16000)  # power 4
    _, scaled4 = mix_at_snr(clean, noise4, 0.0)
    np.testing.assert_allclose(np.abs(scaled4.samples), 1.0, atol=1e-12)


def test_mix_measured_snr_matches_request():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        snr = float(rng.uniform(-5, 25))
        clean = synth_clip("speechlike", 0.5, seed=seed)
        noise = synth_clip("noise_pink", 0.5, seed=seed + 50)
        mixture, scaled = mix_at_snr(clean, noise, snr)
        assert abs(measured_snr_db(clean, scaled) - snr) <= 1e-6
        np.testing.assert_array_equal(
            mixture.samples, clean.samples + scaled.samples)


def test_mix_rejects_degenerate_inputs():
    silent = Waveform(np.zeros(100), 16000)
    tone = Waveform(np.ones(100), 16000)
    with pytest.raises(InvalidInputError):
        mix_at_snr(silent, tone, 0.0)
    with pytest.raises(InvalidInputError):
        mix_at_snr(tone, silent, 0.0)
    with pytest.raises(InvalidInputError):
        mix_at_snr(tone, Waveform(np.ones(50), 16000), 0.0)


def test_wav_round_trip_ramp(tmp_path):
    """Quantization bound: one LSB of 16-bit PCM."""
    ramp = Waveform(np.linspace(-1.0, 1.0, 16000), 16000)
    path = tmp_path / "ramp.wav"
    write_wav(path, ramp)
    back = read_wav(path)
    assert back.sample_rate == 16000
    assert np.max(np.abs(back.samples - ramp.samples)) <= 3.1e-5


def test_wav_round_trip_random(tmp_path):
    # quantization bound applies to in-range amplitudes only
    w = random_waveform(11)
    w = Waveform(np.clip(w.samples, -1.0, 1.0), w.sample_rate)
    path = tmp_path / "r.wav"
    write_wav(path, w)
    assert np.max(np.abs(read_wav(path).samples - w.samples)) <= 3.1e-5


def test_wav_write_clamps(tmp_path):
    loud = Waveform(np.array([2.0, -2.0, 0.5]), 16000)
    path = tmp_path / "loud.wav"
    write_wav(path, loud)
    back = read_wav(path)
    assert np.max(back.samples) <= 1.0
    assert np.min(back.samples) >= -1.0
    assert abs(back.samples[2] - 0.5) <= 3.1e-5


def _wav_bytes(num_channels=1, sample_rate=16000, bits=16, data=b"\x00\x00"):
    byte_rate = sample_rate * num_channels * bits // 8
    block_align = num_channels * bits // 8
    fmt = struct.pack("<HHIIHH", 1, num_channels, sample_rate, byte_rate,
                      block_align, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(data)) + data
    return b"RIFF" + struct.pack("<I", len(body)) + body


def test_wav_rejects_stereo(tmp_path):
    path = tmp_path / "stereo.wav"
    path.write_bytes(_wav_bytes(num_channels=2, data=b"\x00" * 8))
    with pytest.raises(UnsupportedFormatError):
        read_wav(path)


def test_wav_rejects_wrong_rate(tmp_path):
    path = tmp_path / "slow.wav"
    path.write_bytes(_wav_bytes(sample_rate=8000))
    with pytest.raises(UnsupportedFormatError, match="8000"):
        read_wav(path)


def test_wav_rejects_non_pcm(tmp_path):
    raw = bytearray(_wav_bytes())
    raw[20:22] = struct.pack("<H", 3)  # float format tag
    path = tmp_path / "float.wav"
    path.write_bytes(bytes(raw))
    with pytest.raises(UnsupportedFormatError):
        read_wav(path)
