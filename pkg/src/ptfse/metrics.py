"""Objective quality metrics: SI-SDR and STOI.

Both metrics are pure functions of (estimate, reference) sample arrays.
SI-SDR follows the classic scale-invariant definition and assumes
zero-mean inputs (audio is; no mean is removed here so the documented
hand cases hold exactly). STOI is the classic short-time objective
intelligibility measure: one-third-octave band envelopes at 10 kHz,
384 ms sliding segments, per-segment normalization and clipping, mean
normalized correlation.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.signal import resample_poly

from .errors import InvalidInputError
from .signal import Waveform

SI_SDR_CAP_DB = 100.0
SI_SDR_FLOOR_DB = -100.0


@dataclass(frozen=True)
class MetricResult:
    """A named metric value plus optional per-component detail."""

    name: str
    value: float
    auxiliary: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.name:
            raise InvalidInputError("MetricResult needs a non-empty name")

    def line_fragment(self) -> str:
        return f"{self.name}={self.value:.6f}"

STOI_FS = 10000
STOI_FRAME = 256
STOI_FFT = 512
STOI_HOP = 128
STOI_NUM_BANDS = 15
STOI_MIN_FREQ = 150.0
STOI_SEGMENT_FRAMES = 30
STOI_DYN_RANGE_DB = 40.0
STOI_BETA_DB = -15.0

_EPS = 1e-12


def _samples(w) -> np.ndarray:
    if isinstance(w, Waveform):
        return w.samples
    return np.asarray(w, dtype=np.float64)


def si_sdr(est, ref) -> float:
    """Scale-invariant signal-to-distortion ratio in dB.

    The reference is scaled to the least-squares projection of the
    estimate; the value is capped at +100 dB (zero error) and floored at
    -100 dB (estimate orthogonal to the reference).
    """
    est, ref = _samples(est), _samples(ref)
    if est.shape != ref.shape:
        raise InvalidInputError(f"si_sdr: lengths {est.size} and {ref.size} differ")
    ref_energy = float(np.dot(ref, ref))
    if ref_energy == 0.0:
        raise InvalidInputError("si_sdr: reference is identically zero")
    alpha = float(np.dot(est, ref)) / ref_energy
    target = alpha * ref
    target_energy = float(np.dot(target, target))
    error = target - est
    error_energy = float(np.dot(error, error))
    if error_energy == 0.0:
        return SI_SDR_CAP_DB
    if target_energy == 0.0:
        return SI_SDR_FLOOR_DB
    value = 10.0 * np.log10(target_energy / error_energy)
    return float(np.clip(value, SI_SDR_FLOOR_DB, SI_SDR_CAP_DB))


def _stoi_window() -> np.ndarray:
    # 256-point Hann with nonzero endpoints, as the classic method frames it
    return np.hanning(STOI_FRAME + 2)[1:-1]


def _frame_signal(x: np.ndarray, window: np.ndarray) -> np.ndarray:
    """Windowed frames [num_frames, STOI_FRAME] at 50% overlap."""
    n = (x.size - STOI_FRAME) // STOI_HOP + 1
    if n < 1:
        return np.zeros((0, STOI_FRAME))
    starts = np.arange(n) * STOI_HOP
    idx = starts[:, None] + np.arange(STOI_FRAME)[None, :]
    return x[idx] * window


def remove_silent_frames(ref: np.ndarray, est: np.ndarray):
    """Drop frames whose reference energy sits 40 dB under the loudest frame.

    Both signals keep the same frame subset (chosen from the reference)
    and are rebuilt by overlap-add.
    """
    window = _stoi_window()
    ref_frames = _frame_signal(ref, window)
    est_frames = _frame_signal(est, window)
    if ref_frames.shape[0] == 0:
        return ref[:0], est[:0]
    energies_db = 20.0 * np.log10(np.linalg.norm(ref_frames, axis=1) + _EPS)
    keep = energies_db > np.max(energies_db) - STOI_DYN_RANGE_DB
    ref_frames, est_frames = ref_frames[keep], est_frames[keep]
    n = ref_frames.shape[0]
    out_len = STOI_FRAME + (n - 1) * STOI_HOP if n else 0
    ref_out = np.zeros(out_len)
    est_out = np.zeros(out_len)
    for m in range(n):  # kept frames are re-laid contiguously
        lo = m * STOI_HOP
        ref_out[lo:lo + STOI_FRAME] += ref_frames[m]
        est_out[lo:lo + STOI_FRAME] += est_frames[m]
    return ref_out, est_out


def third_octave_band_matrix() -> np.ndarray:
    """[15, 257] matrix of band-membership flags over rfft bins at 10 kHz.

    Band j is centered at 150 * 2^(j/3) Hz with edges a factor 2^(1/6)
    below and above; a bin belongs to band j when edge_low <= f < edge_high.
    """
    bin_freqs = np.arange(STOI_FFT // 2 + 1) * (STOI_FS / STOI_FFT)
    bands = np.arange(STOI_NUM_BANDS)
    centers = STOI_MIN_FREQ * 2.0 ** (bands / 3.0)
    low = centers * 2.0 ** (-1.0 / 6.0)
    high = centers * 2.0 ** (1.0 / 6.0)
    matrix = (bin_freqs[None, :] >= low[:, None]) & (bin_freqs[None, :] < high[:, None])
    return matrix.astype(np.float64)


def _band_envelopes(x: np.ndarray) -> np.ndarray:
    """[15, num_frames] one-third-octave band magnitudes of windowed frames."""
    frames = _frame_signal(x, _stoi_window())
    spectra = np.fft.rfft(frames, n=STOI_FFT, axis=1)  # [num_frames, 257]
    power = np.abs(spectra) ** 2
    return np.sqrt(third_octave_band_matrix() @ power.T)


def stoi(est, ref, fs: int = 16000) -> float:
    """Classic short-time objective intelligibility in [-1, 1]."""
    est, ref = _samples(est), _samples(ref)
    if est.shape != ref.shape:
        raise InvalidInputError(f"stoi: lengths {est.size} and {ref.size} differ")
    if fs <= 0:
        raise InvalidInputError(f"stoi: bad sample rate {fs}")
    if fs != STOI_FS:
        ratio = Fraction(STOI_FS, fs)
        est = resample_poly(est, ratio.numerator, ratio.denominator)
        ref = resample_poly(ref, ratio.numerator, ratio.denominator)
    ref, est = remove_silent_frames(ref, est)
    ref_env = _band_envelopes(ref)
    est_env = _band_envelopes(est)
    num_frames = ref_env.shape[1]
    if num_frames < STOI_SEGMENT_FRAMES:
        raise InvalidInputError(
            f"stoi: {num_frames} frames after silence removal, need at least "
            f"{STOI_SEGMENT_FRAMES} (give a longer clip)"
        )
    clip_gain = 10.0 ** (-STOI_BETA_DB / 20.0)
    total = 0.0
    count = 0
    for end in range(STOI_SEGMENT_FRAMES, num_frames + 1):
        x = ref_env[:, end - STOI_SEGMENT_FRAMES:end]
        y = est_env[:, end - STOI_SEGMENT_FRAMES:end]
        alpha = np.linalg.norm(x, axis=1, keepdims=True) / (
            np.linalg.norm(y, axis=1, keepdims=True) + _EPS)
        y = np.minimum(alpha * y, x * (1.0 + clip_gain))
        xc = x - x.mean(axis=1, keepdims=True)
        yc = y - y.mean(axis=1, keepdims=True)
        denom = np.linalg.norm(xc, axis=1) * np.linalg.norm(yc, axis=1) + _EPS
        total += float(np.sum(np.sum(xc * yc, axis=1) / denom))
        count += STOI_NUM_BANDS
    return total / count
