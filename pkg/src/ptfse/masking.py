"""Complex ratio masks, band partitioning, and the band-pooled losses.

Masks live in two domains. The raw domain is the quotient clean/noisy per
bin; the compressed domain squashes that through a bounded odd function so
regression targets stay in (-10, 10). Training compares masks in the
compressed domain; decompression happens once, at inference.

Loss functions return scalar DiffTensors and accept masks whose planes are
either plain arrays or DiffTensors, so the same code serves oracle
evaluation and end-to-end training.
"""

from dataclasses import dataclass, field

import numpy as np

from .diffcore import DiffTensor, add, avg_pool_freq, linear_forward, mean, mul
from .diffcore import narrow as dt_narrow
from .diffcore import permute, scale, sub
from .errors import ContractError, InvalidConfigError, ShapeError
from .signal import ComplexSpectrogram

MASK_COMPRESS_K = 10.0
MASK_COMPRESS_C = 0.1
CIRM_DENOM_FLOOR = 1e-10
DECOMPRESS_CLAMP_MARGIN = 1e-6


def _plane_array(plane) -> np.ndarray:
    return plane.data if isinstance(plane, DiffTensor) else np.asarray(plane)


def _plane_tensor(plane) -> DiffTensor:
    return plane if isinstance(plane, DiffTensor) else DiffTensor(np.asarray(plane))


@dataclass
class ComplexMask:
    """Per-bin complex gain as two real planes, shape [F, T].

    Planes may be ndarrays or DiffTensors (training intermediates).
    compress_mask output always lies inside (-K, K); tensor-backed
    predictions are only pulled into that interval by the decompression
    clamp, so the flag records the domain, not a verified bound.
    """

    real_part: object
    imag_part: object
    compressed: bool = False

    def __post_init__(self):
        r, i = _plane_array(self.real_part), _plane_array(self.imag_part)
        if r.shape != i.shape or r.ndim != 2:
            raise ShapeError(
                f"ComplexMask: planes must be equal 2-D grids, got {r.shape} and {i.shape}"
            )

    @property
    def shape(self):
        return _plane_array(self.real_part).shape

    def plane_arrays(self):
        return _plane_array(self.real_part), _plane_array(self.imag_part)


@dataclass
class BandPartition:
    """Disjoint low/mid/high bin ranges with their pooling steps and weights."""

    lf_range: tuple
    mf_range: tuple
    hf_range: tuple
    pool_steps: tuple = (1, 2, 4)
    weights: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        lf, mf, hf = self.lf_range, self.mf_range, self.hf_range
        if not (0 == lf[0] < lf[1] == mf[0] < mf[1] == hf[0] < hf[1]):
            raise InvalidConfigError(
                f"band ranges {lf}, {mf}, {hf} must be non-empty, disjoint, "
                "and cover [0, F) in order"
            )
        widths = (lf[1] - lf[0], mf[1] - mf[0], hf[1] - hf[0])
        for width, step, label in zip(widths, self.pool_steps, ("low", "mid", "high")):
            if width % step != 0:
                raise InvalidConfigError(
                    f"{label} band width {width} not divisible by pool step {step}"
                )
        if len(self.weights) != 3:
            raise InvalidConfigError(f"need 3 band weights, got {len(self.weights)}")

    @property
    def num_bins(self) -> int:
        return self.hf_range[1]

    def bands(self):
        """(range, pool step, weight) triples in low-to-high order."""
        return tuple(
            zip((self.lf_range, self.mf_range, self.hf_range),
                self.pool_steps, self.weights)
        )


def band_partition(num_bins: int, n_fft: int, fs: int = 16000,
                   weights=(1.0, 1.0, 1.0)) -> BandPartition:
    """Split [0, num_bins) at fs/4 and 3fs/8.

    Bin k sits at frequency k*fs/n_fft; a bin exactly on a boundary joins
    the band below it. When the high band's width defeats the pool step,
    at most one boundary bin is moved down a band to fix divisibility;
    widths that can't be fixed that way are rejected.
    """
    if num_bins != n_fft // 2 + 1:
        raise InvalidConfigError(
            f"num_bins {num_bins} does not match n_fft {n_fft} (want {n_fft // 2 + 1})"
        )
    # bins k with k*fs/n_fft <= fs/4  <=>  k <= n_fft/4
    lf_end = n_fft // 4 + 1
    mf_end = 3 * n_fft // 8 + 1
    hf_width = num_bins - mf_end
    if hf_width % 4 == 1:
        mf_end += 1  # bottom bin of the high band moves down to mid
        hf_width -= 1
    if hf_width <= 0 or hf_width % 4 != 0:
        raise InvalidConfigError(
            f"high band width {hf_width} for {num_bins} bins cannot be made "
            "divisible by 4 by moving one bin"
        )
    mf_width = mf_end - lf_end
    if mf_width % 2 == 1:
        lf_end += 1  # bottom bin of the mid band moves down to low
        mf_width -= 1
    if mf_width <= 0:
        raise InvalidConfigError(
            f"mid band is empty after adjustment ({num_bins} bins is too few)"
        )
    return BandPartition(
        lf_range=(0, lf_end),
        mf_range=(lf_end, mf_end),
        hf_range=(mf_end, num_bins),
        weights=tuple(float(w) for w in weights),
    )


def cirm(noisy: ComplexSpectrogram, clean: ComplexSpectrogram) -> ComplexMask:
    """Ground-truth complex ratio mask clean/noisy with a floored denominator."""
    if noisy.real_part.shape != clean.real_part.shape:
        raise ShapeError(
            f"cirm: noisy {noisy.real_part.shape} vs clean {clean.real_part.shape}"
        )
    yr, yi = noisy.real_part, noisy.imag_part
    sr, si = clean.real_part, clean.imag_part
    denom = np.maximum(yr * yr + yi * yi, CIRM_DENOM_FLOOR)
    return ComplexMask(
        real_part=(yr * sr + yi * si) / denom,
        imag_part=(yr * si - yi * sr) / denom,
        compressed=False,
    )


def compress_mask(m: ComplexMask) -> ComplexMask:
    """Squash each plane through K*(1-exp(-Cx))/(1+exp(-Cx)).

    That quotient is K*tanh(C*x/2), which is how it is computed so large
    negative entries cannot overflow exp.
    """
    if m.compressed:
        raise ContractError("compress_mask: mask is already compressed")
    r, i = m.plane_arrays()
    half_c = 0.5 * MASK_COMPRESS_C
    return ComplexMask(
        real_part=MASK_COMPRESS_K * np.tanh(half_c * r),
        imag_part=MASK_COMPRESS_K * np.tanh(half_c * i),
        compressed=True,
    )


def decompress_mask(m: ComplexMask) -> ComplexMask:
    """Exact inverse of compress_mask, clamped just inside the asymptotes."""
    if not m.compressed:
        raise ContractError("decompress_mask: mask is not compressed")
    k, c = MASK_COMPRESS_K, MASK_COMPRESS_C
    hi = k - DECOMPRESS_CLAMP_MARGIN

    def inv(y):
        y = np.clip(y, -hi, hi)
        return (1.0 / c) * np.log((k + y) / (k - y))

    r, i = m.plane_arrays()
    return ComplexMask(real_part=inv(r), imag_part=inv(i), compressed=False)


def apply_mask(noisy: ComplexSpectrogram, m: ComplexMask) -> ComplexSpectrogram:
    """Per-bin complex product mask * noisy."""
    if m.compressed:
        raise ContractError("apply_mask: decompress the mask first")
    mr, mi = m.plane_arrays()
    if mr.shape != noisy.real_part.shape:
        raise ShapeError(f"apply_mask: mask {mr.shape} vs spectrogram "
                         f"{noisy.real_part.shape}")
    yr, yi = noisy.real_part, noisy.imag_part
    return ComplexSpectrogram(
        real_part=mr * yr - mi * yi,
        imag_part=mr * yi + mi * yr,
        n_fft=noisy.n_fft,
        hop=noisy.hop,
    )


def _check_loss_pair(pred: ComplexMask, target: ComplexMask):
    if pred.shape != target.shape:
        raise ContractError(f"loss: mask shapes {pred.shape} vs {target.shape}")
    if pred.compressed != target.compressed:
        raise ContractError(
            f"loss: compression flags differ (pred {pred.compressed}, "
            f"target {target.compressed})"
        )


def _plane_mse(pred_plane: DiffTensor, target_plane: DiffTensor) -> DiffTensor:
    diff = sub(pred_plane, target_plane)
    return mean(mul(diff, diff))


def _subset_pool_matrix(band: tuple, step: int, bins: np.ndarray, dtype) -> tuple:
    """Pooling matrix for a band restricted to the retained `bins`.

    Groups are laid on the original bin grid; each kept group averages the
    retained members it still has. Returns (matrix [G_kept, n_band_sel],
    positions of the band's bins inside `bins`), or (None, positions) when
    no group survives.
    """
    lo, hi = band
    positions = np.nonzero((bins >= lo) & (bins < hi))[0]
    if positions.size == 0:
        return None, positions
    local = bins[positions]  # original-grid indices, ascending
    rows = []
    for g_lo in range(lo, hi, step):
        members = np.nonzero((local >= g_lo) & (local < g_lo + step))[0]
        if members.size == 0:
            continue
        row = np.zeros(positions.size, dtype=dtype)
        row[members] = 1.0 / members.size
        rows.append(row)
    if not rows:
        return None, positions
    return np.stack(rows), positions


def _pooled_band_mse(pred_plane, target_plane, band, step, bins) -> DiffTensor:
    """MSE of pooled pred vs pooled target on one band, or None if empty.

    Planes are [F, T] (full grid) or [F_sel, T] with `bins` naming the
    original index of each retained row.
    """
    if bins is None:
        lo, hi = band
        parts = []
        for plane in (pred_plane, target_plane):
            sub_band = dt_narrow(plane, 0, lo, hi - lo)
            parts.append(avg_pool_freq(sub_band, step, axis=0))
        return _plane_mse(parts[0], parts[1])
    matrix, positions = _subset_pool_matrix(band, step, bins, pred_plane.data.dtype)
    if matrix is None:
        return None
    weight = DiffTensor(matrix)
    parts = []
    for plane in (pred_plane, target_plane):
        rows = dt_narrow(plane, 0, int(positions[0]), int(positions.size))
        # [n_sel, T] -> [T, n_sel] so the pool matrix applies per frame
        parts.append(linear_forward(permute(rows, (1, 0)), weight))
    return _plane_mse(parts[0], parts[1])


def pp_cirm_loss(pred: ComplexMask, target: ComplexMask, bands: BandPartition,
                 bins=None) -> DiffTensor:
    """Weighted sum of per-band MSEs of frequency-pooled mask planes.

    Pool steps are 1 (low), 2 (mid), 4 (high); each band's MSE averages
    over pooled bins, frames, and both complex planes. `bins`, when given,
    lists the retained original-grid bin indices (ascending) of a
    drop-band subset; pooling groups stay on the original grid and groups
    or bands left empty by the subset are skipped.
    """
    _check_loss_pair(pred, target)
    if not pred.compressed:
        raise ContractError("pp_cirm_loss: masks must be in the compressed domain")
    if bins is not None:
        bins = np.asarray(bins, dtype=int)
        if bins.size != pred.shape[0]:
            raise ContractError(
                f"pp_cirm_loss: {bins.size} retained bins for {pred.shape[0]} mask rows"
            )
        if bins.size > 1 and not np.all(np.diff(bins) > 0):
            raise ContractError("pp_cirm_loss: retained bins must be ascending")
    pred_r, pred_i = _plane_tensor(pred.real_part), _plane_tensor(pred.imag_part)
    targ_r, targ_i = _plane_tensor(target.real_part), _plane_tensor(target.imag_part)
    total = None
    for band, step, weight in bands.bands():
        terms = []
        for p_plane, t_plane in ((pred_r, targ_r), (pred_i, targ_i)):
            term = _pooled_band_mse(p_plane, t_plane, band, step, bins)
            if term is not None:
                terms.append(term)
        if not terms:
            continue
        band_mse = scale(add(terms[0], terms[1]), 0.5)
        contribution = scale(band_mse, float(weight))
        total = contribution if total is None else add(total, contribution)
    if total is None:
        raise ContractError("pp_cirm_loss: every band was empty under the bin subset")
    return total


def cirm_mse_loss(pred: ComplexMask, target: ComplexMask) -> DiffTensor:
    """Plain MSE over both planes and every bin; the ablation objective."""
    if pred.shape != target.shape:
        raise ShapeError(f"cirm_mse_loss: mask shapes {pred.shape} vs {target.shape}")
    if pred.compressed != target.compressed:
        raise ContractError(
            f"cirm_mse_loss: compression flags differ (pred {pred.compressed}, "
            f"target {target.compressed})"
        )
    mse_r = _plane_mse(_plane_tensor(pred.real_part), _plane_tensor(target.real_part))
    mse_i = _plane_mse(_plane_tensor(pred.imag_part), _plane_tensor(target.imag_part))
    return scale(add(mse_r, mse_i), 0.5)
