"""Core audio value types: waveforms and spectrograms."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError, ShapeError

PIPELINE_SAMPLE_RATE = 16000


@dataclass
class Waveform:
    """Mono sampled audio. Amplitudes are nominally in [-1, 1].

    Treated as immutable after construction; operations return new values.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ShapeError(f"waveform must be 1-D, got shape {self.samples.shape}")
        if self.samples.size == 0:
            raise InvalidInputError("waveform has no samples")
        if self.sample_rate <= 0:
            raise InvalidInputError(f"sample rate must be positive, got {self.sample_rate}")

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass
class ComplexSpectrogram:
    """One-sided STFT grid split into real and imaginary planes (F x T)."""

    real_part: np.ndarray
    imag_part: np.ndarray
    n_fft: int
    hop: int

    def __post_init__(self):
        self.real_part = np.asarray(self.real_part, dtype=np.float64)
        self.imag_part = np.asarray(self.imag_part, dtype=np.float64)
        if self.real_part.shape != self.imag_part.shape:
            raise ShapeError(
                f"real plane {self.real_part.shape} != imag plane {self.imag_part.shape}"
            )
        if self.real_part.ndim != 2:
            raise ShapeError(f"spectrogram must be F x T, got {self.real_part.shape}")
        if self.real_part.shape[0] != self.n_fft // 2 + 1:
            raise ShapeError(
                f"expected {self.n_fft // 2 + 1} bins for n_fft={self.n_fft}, "
                f"got {self.real_part.shape[0]}"
            )

    @property
    def num_bins(self) -> int:
        return self.real_part.shape[0]

    @property
    def num_frames(self) -> int:
        return self.real_part.shape[1]

    def as_complex(self) -> np.ndarray:
        return self.real_part + 1j * self.imag_part


@dataclass
class MagnitudeSpectrogram:
    """Non-negative magnitude grid (F x T) derived from a complex spectrogram."""

    values: np.ndarray = field()

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ShapeError(f"magnitude grid must be F x T, got {self.values.shape}")


def magnitude(spec: ComplexSpectrogram) -> MagnitudeSpectrogram:
    """Per-bin magnitude sqrt(re^2 + im^2); everywhere >= 0 by construction."""
    return MagnitudeSpectrogram(np.hypot(spec.real_part, spec.imag_part))
