"""Audio I/O, STFT analysis/synthesis, mixing, and corpus synthesis."""

from .mixing import measured_snr_db, mix_at_snr, power
from .stft import istft, num_frames, periodic_hann, stft, synthesizable_length
from .synth import CLIP_KINDS, synth_clip
from .types import (
    PIPELINE_SAMPLE_RATE,
    ComplexSpectrogram,
    MagnitudeSpectrogram,
    Waveform,
    magnitude,
)
from .wavio import read_wav, write_wav

__all__ = [
    "PIPELINE_SAMPLE_RATE",
    "CLIP_KINDS",
    "ComplexSpectrogram",
    "MagnitudeSpectrogram",
    "Waveform",
    "istft",
    "magnitude",
    "measured_snr_db",
    "mix_at_snr",
    "num_frames",
    "periodic_hann",
    "power",
    "read_wav",
    "stft",
    "synth_clip",
    "synthesizable_length",
    "write_wav",
]
