"""Model hyperparameters and named size profiles."""

from dataclasses import dataclass, replace

from ..errors import InvalidConfigError

LOSS_KINDS = ("pp_cirm", "mse")


@dataclass
class ModelConfig:
    """Everything that fixes the network's architecture.

    Defaults are the full-scale configuration: 512/256 STFT, 2 frames of
    look-ahead (32 ms at 16 kHz), 15 context bins per side, LSTM hidden
    sizes 512 (full-band) and 384 (sub-band), and the frequency/temporal
    transformation blocks enabled with the band-pooled loss.
    """

    n_fft: int = 512
    hop: int = 256
    tau: int = 2
    context: int = 15
    full_hidden: int = 512
    sub_hidden: int = 384
    ttrans_hidden: int = 257
    ttrans_fc: int = 257
    ftrans_conv1d_kernel: int = 9
    enable_f_trans: bool = True
    enable_t_trans: bool = True
    loss_kind: str = "pp_cirm"
    loss_weights: tuple = (1.0, 1.0, 1.0)
    drop_band_groups: int = 2

    def __post_init__(self):
        if self.n_fft <= 0 or self.n_fft % 2 != 0:
            raise InvalidConfigError(f"n_fft must be positive and even, got {self.n_fft}")
        if self.hop <= 0 or self.n_fft % self.hop != 0:
            raise InvalidConfigError(
                f"hop {self.hop} must be positive and divide n_fft {self.n_fft}"
            )
        if self.tau < 0:
            raise InvalidConfigError(f"tau must be >= 0, got {self.tau}")
        if self.context < 0:
            raise InvalidConfigError(f"context must be >= 0, got {self.context}")
        if self.context >= self.f_bins:
            raise InvalidConfigError(
                f"context {self.context} must be smaller than the bin count {self.f_bins}"
            )
        for name in ("full_hidden", "sub_hidden", "ttrans_hidden", "ttrans_fc"):
            if getattr(self, name) < 1:
                raise InvalidConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.ftrans_conv1d_kernel % 2 == 0 or self.ftrans_conv1d_kernel < 1:
            raise InvalidConfigError(
                f"ftrans_conv1d_kernel must be odd and positive, "
                f"got {self.ftrans_conv1d_kernel}"
            )
        if self.loss_kind not in LOSS_KINDS:
            raise InvalidConfigError(
                f"loss_kind must be one of {LOSS_KINDS}, got {self.loss_kind!r}"
            )
        self.loss_weights = tuple(float(w) for w in self.loss_weights)
        if len(self.loss_weights) != 3:
            raise InvalidConfigError(
                f"loss_weights needs 3 entries, got {len(self.loss_weights)}"
            )
        if self.drop_band_groups < 1:
            raise InvalidConfigError(
                f"drop_band_groups must be >= 1, got {self.drop_band_groups}"
            )

    @property
    def f_bins(self) -> int:
        return self.n_fft // 2 + 1

    @property
    def subband_width(self) -> int:
        """Inner width of one sub-band input vector: 2N+1 bins + 1 embedding element."""
        return 2 * self.context + 1 + 1

    def with_variant(self, which: str) -> "ModelConfig":
        """The same sizes with the block toggles of a named ablation variant."""
        toggles = {
            "baseline": (False, False),
            "+f_trans": (True, False),
            "+t_trans": (False, True),
            "full": (True, True),
        }
        if which not in toggles:
            raise InvalidConfigError(
                f"unknown variant {which!r}, want one of {sorted(toggles)}"
            )
        f_on, t_on = toggles[which]
        return replace(self, enable_f_trans=f_on, enable_t_trans=t_on)


def full_scale_config(**overrides) -> ModelConfig:
    """The full-scale profile (all defaults)."""
    return ModelConfig(**overrides)


def compact_config(**overrides) -> ModelConfig:
    """Desk-scale profile: small enough to train in minutes on a CPU.

    129 bins (256/128 STFT), 3 context bins per side, one look-ahead
    frame, hidden sizes 32/24, transformation blocks sized to the grid.
    """
    base = dict(
        n_fft=256,
        hop=128,
        tau=1,
        context=3,
        full_hidden=32,
        sub_hidden=24,
        ttrans_hidden=129,
        ttrans_fc=129,
    )
    base.update(overrides)
    return ModelConfig(**base)


def tiny_config(**overrides) -> ModelConfig:
    """Gradient-check profile: 9 bins, hidden 8/6, one neighbor per side."""
    base = dict(
        n_fft=16,
        hop=8,
        tau=1,
        context=1,
        full_hidden=8,
        sub_hidden=6,
        ttrans_hidden=9,
        ttrans_fc=9,
    )
    base.update(overrides)
    return ModelConfig(**base)
