"""Complex ratio masks: construction, compression, band partition, and the
band-pooled loss against a brute-force evaluator."""

import numpy as np
import pytest

from ptfse.diffcore import DiffTensor, backward
from ptfse.errors import ContractError, InvalidConfigError, ShapeError
from ptfse.masking import (BandPartition, ComplexMask, MASK_COMPRESS_C,
                           MASK_COMPRESS_K, apply_mask, band_partition, cirm,
                           cirm_mse_loss, compress_mask, decompress_mask,
                           pp_cirm_loss)
from ptfse.signal import ComplexSpectrogram


def _spec(real, imag, n_fft=16, hop=8):
    """Spectrogram whose planes are constant grids (or full arrays)."""
    bins = n_fft // 2 + 1
    r = np.asarray(real, dtype=np.float64)
    i = np.asarray(imag, dtype=np.float64)
    if r.ndim == 0:
        r = np.full((bins, 1), float(r))
        i = np.full((bins, 1), float(i))
    return ComplexSpectrogram(r, i, n_fft=n_fft, hop=hop)


def _grid(value, shape=(9, 1)):
    return np.full(shape, float(value))


def test_cirm_identity_when_clean_equals_noisy():
    rng = np.random.default_rng(0)
    y = _spec(rng.standard_normal((9, 6)) + 0.3, rng.standard_normal((9, 6)))
    m = cirm(y, y)
    np.testing.assert_allclose(m.real_part, 1.0, atol=1e-9)
    np.testing.assert_allclose(m.imag_part, 0.0, atol=1e-9)


def test_cirm_hand_values():
    # Y = 1, S = i  ->  M = i
    m = cirm(_spec(1.0, 0.0), _spec(0.0, 1.0))
    assert (m.real_part[0, 0], m.imag_part[0, 0]) == (0.0, 1.0)
    # Y = 1+1i, S = 1  ->  M = (1 - 1i)/2
    m = cirm(_spec(1.0, 1.0), _spec(1.0, 0.0))
    np.testing.assert_allclose([m.real_part[0, 0], m.imag_part[0, 0]],
                               [0.5, -0.5], atol=1e-15)


def test_cirm_matches_complex_division():
    rng = np.random.default_rng(1)
    yr, yi = rng.standard_normal((2, 5, 7))
    sr, si = rng.standard_normal((2, 5, 7))
    m = cirm(_spec(yr, yi, n_fft=8, hop=4), _spec(sr, si, n_fft=8, hop=4))
    expected = (sr + 1j * si) / (yr + 1j * yi)
    np.testing.assert_allclose(m.real_part + 1j * m.imag_part, expected,
                               rtol=1e-9)


def test_cirm_denominator_floor_keeps_finite():
    m = cirm(_spec(0.0, 0.0), _spec(1.0, 1.0))
    assert np.all(np.isfinite(m.real_part)) and np.all(np.isfinite(m.imag_part))


def test_cirm_shape_mismatch():
    with pytest.raises(ShapeError):
        cirm(_spec(1.0, 0.0, n_fft=16), _spec(1.0, 0.0, n_fft=8, hop=4))


def test_compress_is_scaled_tanh():
    xs = np.array([[-40.0, -2.0, 0.0, 0.5, 10.0, 40.0]]).T @ np.ones((1, 2))
    m = compress_mask(ComplexMask(xs, np.zeros_like(xs)))
    expected = MASK_COMPRESS_K * np.tanh(0.5 * MASK_COMPRESS_C * xs)
    np.testing.assert_allclose(m.real_part, expected, rtol=1e-12)
    assert m.compressed
    # frozen point: x = 10 compresses to K*(1-e^-1)/(1+e^-1)
    ten = compress_mask(ComplexMask(_grid(10.0), _grid(0.0)))
    assert ten.real_part[0, 0] == pytest.approx(4.6211715726000975, abs=1e-12)


def test_compress_saturates_below_k():
    big = compress_mask(ComplexMask(_grid(1e9), _grid(-1e9)))
    assert big.real_part[0, 0] == pytest.approx(MASK_COMPRESS_K)
    assert big.imag_part[0, 0] == pytest.approx(-MASK_COMPRESS_K)
    assert abs(big.real_part[0, 0]) <= MASK_COMPRESS_K


def test_compress_decompress_round_trip():
    rng = np.random.default_rng(2)
    x = rng.uniform(-40.0, 40.0, size=(6, 8))
    y = rng.uniform(-40.0, 40.0, size=(6, 8))
    back = decompress_mask(compress_mask(ComplexMask(x, y)))
    np.testing.assert_allclose(back.real_part, x, atol=1e-5)
    np.testing.assert_allclose(back.imag_part, y, atol=1e-5)
    assert not back.compressed


def test_compress_state_contract():
    m = compress_mask(ComplexMask(_grid(1.0), _grid(0.0)))
    with pytest.raises(ContractError):
        compress_mask(m)
    with pytest.raises(ContractError):
        decompress_mask(ComplexMask(_grid(1.0), _grid(0.0)))


def test_decompress_clamps_out_of_range_predictions():
    wild = ComplexMask(_grid(MASK_COMPRESS_K + 3.0), _grid(-12.0),
                       compressed=True)
    back = decompress_mask(wild)
    assert np.all(np.isfinite(back.real_part))
    assert np.all(np.isfinite(back.imag_part))


def test_apply_mask_complex_product():
    # (1+1i) * i = -1+1i
    y = _spec(1.0, 1.0)
    m = ComplexMask(_grid(0.0), _grid(1.0))
    out = apply_mask(y, m)
    assert (out.real_part[0, 0], out.imag_part[0, 0]) == (-1.0, 1.0)
    with pytest.raises(ContractError):
        apply_mask(y, ComplexMask(_grid(0.0), _grid(1.0), compressed=True))
    with pytest.raises(ShapeError):
        apply_mask(y, ComplexMask(np.zeros((2, 2)), np.zeros((2, 2))))


def test_oracle_mask_recovers_clean():
    rng = np.random.default_rng(3)
    yr, yi = rng.standard_normal((2, 9, 6)) + 0.5
    sr, si = rng.standard_normal((2, 9, 6))
    noisy, clean = _spec(yr, yi), _spec(sr, si)
    rebuilt = apply_mask(noisy, cirm(noisy, clean))
    mag = np.abs(yr + 1j * yi)
    rel = np.abs((rebuilt.real_part + 1j * rebuilt.imag_part) -
                 (sr + 1j * si)) / np.maximum(np.abs(sr + 1j * si), 1e-12)
    assert np.max(rel[mag > 1e-4]) <= 1e-6


@pytest.mark.parametrize("n_fft,expected", [
    (512, ((0, 129), (129, 193), (193, 257))),
    (256, ((0, 65), (65, 97), (97, 129))),
    (32, ((0, 9), (9, 13), (13, 17))),
])
def test_band_partition_edges(n_fft, expected):
    bands = band_partition(n_fft // 2 + 1, n_fft)
    assert (bands.lf_range, bands.mf_range, bands.hf_range) == expected
    assert tuple(bands.pool_steps) == (1, 2, 4)
    ranges = (bands.lf_range, bands.mf_range, bands.hf_range)
    for (lo, hi), step in zip(ranges, bands.pool_steps):
        assert (hi - lo) % step == 0


def test_band_partition_rejects_tiny_grid():
    with pytest.raises(InvalidConfigError):
        band_partition(9, 16)


def test_band_partition_bin_count_mismatch():
    with pytest.raises(InvalidConfigError):
        band_partition(256, 512)


def test_band_partition_direct_validation():
    with pytest.raises(InvalidConfigError):
        BandPartition(lf_range=(0, 3), mf_range=(4, 6), hf_range=(6, 10))
    with pytest.raises(InvalidConfigError):
        BandPartition(lf_range=(0, 3), mf_range=(3, 6), hf_range=(6, 9))


def _toy_bands(weights=(1.0, 1.0, 1.0)):
    # 9-bin toy grid partitioned by hand: 3 + 2 + 4 bins
    return BandPartition(lf_range=(0, 3), mf_range=(3, 5), hf_range=(5, 9),
                         pool_steps=(1, 2, 4), weights=weights)


def _mask_pair(pred_r, pred_i, tgt_r, tgt_i):
    pred = ComplexMask(np.asarray(pred_r, dtype=np.float64),
                       np.asarray(pred_i, dtype=np.float64), compressed=True)
    tgt = ComplexMask(np.asarray(tgt_r, dtype=np.float64),
                      np.asarray(tgt_i, dtype=np.float64), compressed=True)
    return pred, tgt


def brute_force_pp_loss(pred, target, bands, bins=None):
    """Straight-line evaluator: pool each plane per band on the original
    grid, then average squared differences. Written independently of the
    graph implementation; `pred`/`target` planes are full [F, T] grids and
    `bins` names the retained rows."""
    num_bins = pred.real_part.shape[0]
    sel = list(range(num_bins)) if bins is None else list(bins)
    total = 0.0
    used = False
    triples = zip((bands.lf_range, bands.mf_range, bands.hf_range),
                  bands.pool_steps, bands.weights)
    for (lo, hi), step, weight in triples:
        per_plane = []
        for full_p, full_t in ((pred.real_part, target.real_part),
                               (pred.imag_part, target.imag_part)):
            acc, cells = 0.0, 0
            for group_lo in range(lo, hi, step):
                members = [k for k in range(group_lo, group_lo + step)
                           if k in sel]
                if not members:
                    continue
                for t in range(pred.real_part.shape[1]):
                    pv = sum(full_p[k, t] for k in members) / len(members)
                    tv = sum(full_t[k, t] for k in members) / len(members)
                    acc += (pv - tv) ** 2
                    cells += 1
            if cells == 0:
                per_plane = None
                break
            per_plane.append(acc / cells)
        if per_plane is not None:
            total += weight * 0.5 * (per_plane[0] + per_plane[1])
            used = True
    if not used:
        raise ContractError("no band kept any bins")
    return total


def test_pp_loss_toy_instance_value():
    """All-ones target vs zero prediction: each band contributes 0.5, so
    the loss is exactly 1.5. The arithmetic is exact, so the brute-force
    evaluator must agree bit for bit."""
    pred, tgt = _mask_pair(np.zeros((9, 2)), np.zeros((9, 2)),
                           np.ones((9, 2)), np.zeros((9, 2)))
    bands = _toy_bands()
    value = pp_cirm_loss(pred, tgt, bands).item()
    assert value == 1.5
    assert value == brute_force_pp_loss(pred, tgt, bands)


def test_pp_loss_matches_brute_force_on_exact_values():
    """Half-integer grids keep all pooling arithmetic exact; both routes
    must produce the identical float."""
    rng = np.random.default_rng(4)
    for trial in range(5):
        planes = [rng.integers(-4, 5, size=(9, 3)) / 2.0 for _ in range(4)]
        pred, tgt = _mask_pair(*planes)
        value = pp_cirm_loss(pred, tgt, _toy_bands()).item()
        assert value == brute_force_pp_loss(pred, tgt, _toy_bands())


def test_pp_loss_matches_brute_force_random():
    rng = np.random.default_rng(5)
    pred, tgt = _mask_pair(*(rng.standard_normal((9, 4)) for _ in range(4)))
    value = pp_cirm_loss(pred, tgt, _toy_bands()).item()
    assert value == pytest.approx(brute_force_pp_loss(pred, tgt, _toy_bands()),
                                  rel=1e-12)


def test_pp_loss_zero_iff_pooled_bands_coincide():
    pred, tgt = _mask_pair(np.zeros((9, 2)), np.zeros((9, 2)),
                           np.zeros((9, 2)), np.zeros((9, 2)))
    assert pp_cirm_loss(pred, tgt, _toy_bands()).item() == 0.0
    # differences that cancel inside one pooling group leave zero loss
    tgt2_r = np.zeros((9, 2))
    tgt2_r[3, :] = 0.5
    tgt2_r[4, :] = -0.5  # mid-band group {3,4} pools to 0
    pred2, tgt2 = _mask_pair(np.zeros((9, 2)), np.zeros((9, 2)),
                             tgt2_r, np.zeros((9, 2)))
    assert pp_cirm_loss(pred2, tgt2, _toy_bands()).item() == 0.0
    # but an uncancelled difference is seen
    tgt3_r = tgt2_r.copy()
    tgt3_r[4, :] = 0.5
    pred3, tgt3 = _mask_pair(np.zeros((9, 2)), np.zeros((9, 2)),
                             tgt3_r, np.zeros((9, 2)))
    assert pp_cirm_loss(pred3, tgt3, _toy_bands()).item() > 0.0


def test_pp_loss_linear_in_weights():
    rng = np.random.default_rng(6)
    planes = [rng.standard_normal((9, 3)) for _ in range(4)]
    pred, tgt = _mask_pair(*planes)
    parts = []
    for which in range(3):
        weights = [0.0, 0.0, 0.0]
        weights[which] = 1.0
        parts.append(pp_cirm_loss(pred, tgt,
                                  _toy_bands(tuple(weights))).item())
    combined = pp_cirm_loss(pred, tgt, _toy_bands((2.0, 3.0, 0.5))).item()
    expected = 2.0 * parts[0] + 3.0 * parts[1] + 0.5 * parts[2]
    assert combined == pytest.approx(expected, rel=1e-12)


def test_pp_loss_subset_equals_dense_on_full_bins():
    rng = np.random.default_rng(7)
    pred, tgt = _mask_pair(*(rng.standard_normal((9, 3)) for _ in range(4)))
    dense = pp_cirm_loss(pred, tgt, _toy_bands()).item()
    subset = pp_cirm_loss(pred, tgt, _toy_bands(), bins=list(range(9))).item()
    assert subset == pytest.approx(dense, rel=1e-12)


def test_pp_loss_subset_matches_brute_force():
    rng = np.random.default_rng(8)
    full = [rng.standard_normal((9, 3)) for _ in range(4)]
    for offset in (0, 1):
        bins = list(range(offset, 9, 2))
        pred_sub, tgt_sub = _mask_pair(*(plane[bins] for plane in full))
        value = pp_cirm_loss(pred_sub, tgt_sub, _toy_bands(), bins=bins).item()
        pred_full, tgt_full = _mask_pair(*full)
        expected = brute_force_pp_loss(pred_full, tgt_full, _toy_bands(),
                                       bins=bins)
        assert value == pytest.approx(expected, rel=1e-12)


def test_pp_loss_gradient_flows_to_prediction():
    pred_r = DiffTensor(np.zeros((9, 2)), requires_grad=True, dtype=np.float64)
    pred_i = DiffTensor(np.zeros((9, 2)), requires_grad=True, dtype=np.float64)
    pred = ComplexMask(pred_r, pred_i, compressed=True)
    tgt = ComplexMask(np.ones((9, 2)), np.zeros((9, 2)), compressed=True)
    loss = pp_cirm_loss(pred, tgt, _toy_bands())
    backward(loss)
    assert pred_r.grad is not None and np.any(pred_r.grad != 0.0)
    # imag planes agree everywhere -> zero gradient there
    np.testing.assert_array_equal(pred_i.grad, 0.0)


def test_pp_loss_requires_compressed_masks():
    raw = ComplexMask(np.zeros((9, 2)), np.zeros((9, 2)))
    comp = ComplexMask(np.zeros((9, 2)), np.zeros((9, 2)), compressed=True)
    with pytest.raises(ContractError):
        pp_cirm_loss(raw, comp, _toy_bands())
    with pytest.raises(ContractError):
        pp_cirm_loss(raw, ComplexMask(np.zeros((9, 2)), np.zeros((9, 2))),
                     _toy_bands())


def test_pp_loss_bins_validation():
    pred, tgt = _mask_pair(np.zeros((4, 2)), np.zeros((4, 2)),
                           np.zeros((4, 2)), np.zeros((4, 2)))
    with pytest.raises(ContractError):
        pp_cirm_loss(pred, tgt, _toy_bands(), bins=[3, 1, 5, 7])
    with pytest.raises(ContractError):
        pp_cirm_loss(pred, tgt, _toy_bands(), bins=[0, 2, 4])


def test_mse_loss_value_and_flags():
    pred, tgt = _mask_pair(np.zeros((3, 2)), np.zeros((3, 2)),
                           np.full((3, 2), 2.0), np.zeros((3, 2)))
    # real plane mse 4, imag 0 -> 0.5*(4+0)
    assert cirm_mse_loss(pred, tgt).item() == 2.0
    raw = ComplexMask(np.zeros((3, 2)), np.zeros((3, 2)))
    with pytest.raises(ContractError):
        cirm_mse_loss(pred, raw)
    with pytest.raises(ShapeError):
        cirm_mse_loss(pred, ComplexMask(np.zeros((4, 2)), np.zeros((4, 2)),
                                        compressed=True))


def test_mse_loss_constant_offset():
    rng = np.random.default_rng(9)
    base = rng.standard_normal((5, 4))
    for delta in (0.25, 1.5):
        pred, tgt = _mask_pair(base, base + delta, base, base)
        # imag plane offset by delta, real exact: loss = 0.5 * delta^2
        assert cirm_mse_loss(pred, tgt).item() == pytest.approx(
            0.5 * delta * delta, rel=1e-12)
