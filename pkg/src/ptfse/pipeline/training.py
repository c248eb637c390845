"""Training loop: dynamic mixing, compressed-mask targets, staged Adam."""

import time
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

import numpy as np

from ..diffcore import (DiffTensor, adam_step, add, backward, init_adam,
                        narrow, reshape, save_checkpoint, scale,
                        staged_learning_rate, zero_grad)
from ..errors import InvalidConfigError, TrainingDivergedError
from ..figures import save_loss_curve_png
from ..masking import (ComplexMask, band_partition, cirm, cirm_mse_loss,
                       compress_mask, pp_cirm_loss)
from ..model import LOSS_KINDS, ModelConfig, init_params, pt_fse_forward
from .dataset import drop_band_select, dynamic_mix_batch, load_pool


@dataclass
class TrainConfig:
    epochs: int = 2
    steps_per_epoch: int = 4
    batch_size: int = 4
    lr_initial: float = 0.001
    lr_after: float = 0.0003
    lr_switch_epoch: int = 100
    snr_range_db: tuple = (0.0, 20.0)
    clip_seconds: float = 2.0
    seed: int = 0
    loss_kind: str = "pp_cirm"
    drop_band_groups: int = 2

    def __post_init__(self):
        if self.epochs < 0:
            raise InvalidConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.steps_per_epoch < 1:
            raise InvalidConfigError(
                f"steps_per_epoch must be >= 1, got {self.steps_per_epoch}")
        if self.batch_size < 1:
            raise InvalidConfigError(
                f"batch_size must be >= 1, got {self.batch_size}")
        if self.lr_switch_epoch < 1:
            raise InvalidConfigError(
                f"lr_switch_epoch must be >= 1, got {self.lr_switch_epoch}")
        if len(self.snr_range_db) != 2 or self.snr_range_db[0] > self.snr_range_db[1]:
            raise InvalidConfigError(
                f"snr_range_db must be a non-empty [lo, hi], got {self.snr_range_db}")
        if self.clip_seconds <= 0:
            raise InvalidConfigError(
                f"clip_seconds must be positive, got {self.clip_seconds}")
        if self.loss_kind not in LOSS_KINDS:
            raise InvalidConfigError(
                f"loss_kind must be one of {LOSS_KINDS}, got {self.loss_kind!r}")
        if self.drop_band_groups < 1:
            raise InvalidConfigError(
                f"drop_band_groups must be >= 1, got {self.drop_band_groups}")


@dataclass
class TrainReport:
    loss_trace: list = field(default_factory=list)
    epoch_learning_rates: list = field(default_factory=list)
    checkpoint_path: str = ""
    report_path: str = ""
    curve_path: str = ""
    elapsed_seconds: float = 0.0


def report_line(step: int, epoch: int, lr: float, loss: float) -> str:
    return f"step={step} epoch={epoch} lr={lr:g} loss={loss:.10g}"


def _prediction_mask(planes: DiffTensor) -> ComplexMask:
    """Split the network's [2, F, T] output into a compressed mask."""
    _, f, t = planes.shape
    real = reshape(narrow(planes, 0, 0, 1), (f, t))
    imag = reshape(narrow(planes, 0, 1, 1), (f, t))
    return ComplexMask(real, imag, compressed=True)


def _largest_grad_block(params: dict) -> str:
    """Name of the parameter block with the largest gradient norm.

    Non-finite norms rank above every finite one: after a blowup the
    offending block is the interesting one.
    """
    best_name, best_key = "<none>", (-1, -np.inf)
    for name, p in params.items():
        if p.grad is None:
            continue
        norm = float(np.sqrt(np.sum(p.grad.astype(np.float64) ** 2)))
        key = (0 if np.isfinite(norm) else 1, norm if np.isfinite(norm) else np.inf)
        if key > best_key:
            best_key, best_name = key, name
    return best_name


def train_step(params: dict, batch, model_cfg: ModelConfig, bins, loss_kind: str,
               bands) -> DiffTensor:
    """Forward the whole batch and return the mean item loss (a scalar node)."""
    restricted = bins is not None and len(bins) < model_cfg.f_bins
    item_losses = []
    for item in batch:
        pred = pt_fse_forward(item.noisy_mag, model_cfg, params,
                              bins=bins if restricted else None)
        pred_mask = _prediction_mask(pred)
        target = compress_mask(cirm(item.noisy_spec, item.clean_spec))
        if restricted:
            target = ComplexMask(target.real_part[bins, :],
                                 target.imag_part[bins, :], compressed=True)
        if loss_kind == "pp_cirm":
            item_losses.append(pp_cirm_loss(pred_mask, target, bands,
                                            bins=bins if restricted else None))
        else:
            item_losses.append(cirm_mse_loss(pred_mask, target))
    return scale(reduce(add, item_losses), 1.0 / len(item_losses))


def train(model_cfg: ModelConfig, train_cfg: TrainConfig, data_dir,
          out_dir) -> TrainReport:
    """Run the full loop and write checkpoint, report, and loss curve.

    `data_dir` must hold clean/ and noise/ WAV subdirectories. Fully
    reproducible from (seed, configs, data): the batch stream, the
    frequency-drop offsets, and the initialization all derive from
    train_cfg.seed. A non-finite loss aborts with a diagnostic naming
    the step and the parameter block with the largest gradient norm.
    """
    started = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    clean_pool = load_pool(Path(data_dir) / "clean")
    noise_pool = load_pool(Path(data_dir) / "noise")

    rng = np.random.default_rng(train_cfg.seed)
    params = init_params(model_cfg, seed=train_cfg.seed)
    adam = init_adam(params)
    bands = band_partition(model_cfg.f_bins, model_cfg.n_fft,
                           weights=model_cfg.loss_weights)

    report = TrainReport()
    lines = []
    step = 0
    for epoch in range(train_cfg.epochs):
        lr = staged_learning_rate(epoch, train_cfg.lr_initial,
                                  train_cfg.lr_after, train_cfg.lr_switch_epoch)
        report.epoch_learning_rates.append(lr)
        for _ in range(train_cfg.steps_per_epoch):
            step += 1
            batch = dynamic_mix_batch(clean_pool, noise_pool, train_cfg, rng,
                                      model_cfg.n_fft, model_cfg.hop)
            bins = drop_band_select(model_cfg.f_bins,
                                    train_cfg.drop_band_groups, rng)
            zero_grad(params)
            loss = train_step(params, batch, model_cfg, bins,
                              train_cfg.loss_kind, bands)
            backward(loss)
            loss_value = loss.item()
            if not np.isfinite(loss_value):
                raise TrainingDivergedError(
                    f"non-finite loss {loss_value} at step {step}; largest "
                    f"gradient norm in block {_largest_grad_block(params)!r}"
                )
            grads = {name: p.grad for name, p in params.items()}
            new_values, adam = adam_step(params, grads, adam, lr)
            params = {name: DiffTensor(v, requires_grad=True)
                      for name, v in new_values.items()}
            report.loss_trace.append(loss_value)
            lines.append(report_line(step, epoch, lr, loss_value))

    checkpoint_path = out_dir / "checkpoint.ptfse"
    save_checkpoint(checkpoint_path, {name: p.data for name, p in params.items()})
    report_path = out_dir / "report.txt"
    report_path.write_text("\n".join(lines) + ("\n" if lines else ""))
    curve_path = out_dir / "loss_curve.png"
    if report.loss_trace:
        save_loss_curve_png(curve_path, report.loss_trace)
        report.curve_path = str(curve_path)
    report.checkpoint_path = str(checkpoint_path)
    report.report_path = str(report_path)
    report.elapsed_seconds = time.perf_counter() - started
    return report
