"""`key = value` config parsing, defaults, echoing, and round trips."""

import pytest

from ptfse.configfile import (config_text, configs_from_values, load_config,
                              parse_config_text, save_config)
from ptfse.errors import InvalidConfigError
from ptfse.model import ModelConfig
from ptfse.pipeline import TrainConfig


def test_defaults_on_empty_text():
    model_cfg, train_cfg = configs_from_values(parse_config_text(""))
    assert model_cfg == ModelConfig()
    assert train_cfg == TrainConfig()


def test_parse_basic_keys():
    text = """
    # toy setup
    n_fft = 256
    hop = 128
    context = 3
    full_hidden = 32
    sub_hidden = 24
    ttrans_hidden = 129
    ttrans_fc = 129
    tau = 1

    epochs = 3
    batch_size = 2
    lr_initial = 0.002
    snr_range_db = 0, 20
    enable_f_trans = false
    loss_kind = mse
    drop_band_groups = 4
    """
    model_cfg, train_cfg = configs_from_values(parse_config_text(text))
    assert model_cfg.n_fft == 256 and model_cfg.f_bins == 129
    assert model_cfg.enable_f_trans is False
    assert model_cfg.enable_t_trans is True  # untouched default
    assert train_cfg.epochs == 3 and train_cfg.batch_size == 2
    assert train_cfg.lr_initial == 0.002
    assert train_cfg.snr_range_db == (0.0, 20.0)
    # shared keys land on both configs
    assert model_cfg.loss_kind == train_cfg.loss_kind == "mse"
    assert model_cfg.drop_band_groups == train_cfg.drop_band_groups == 4


def test_unknown_key_names_key_and_line():
    with pytest.raises(InvalidConfigError, match=r"'window_len'.*line 3"):
        parse_config_text("n_fft = 512\n\nwindow_len = 256\n")


def test_duplicate_key_rejected():
    with pytest.raises(InvalidConfigError, match=r"duplicate.*'hop'.*line 2"):
        parse_config_text("hop = 128\nhop = 256\n")


def test_missing_equals_rejected():
    with pytest.raises(InvalidConfigError, match="line 1"):
        parse_config_text("just some words\n")


def test_bad_value_names_key_and_line():
    with pytest.raises(InvalidConfigError, match=r"'epochs'.*line 1"):
        parse_config_text("epochs = many\n")
    with pytest.raises(InvalidConfigError, match=r"'enable_t_trans'"):
        parse_config_text("enable_t_trans = sometimes\n")
    with pytest.raises(InvalidConfigError, match=r"'snr_range_db'"):
        parse_config_text("snr_range_db = 0,,20\n")


def test_semantic_errors_surface_from_dataclasses():
    with pytest.raises(InvalidConfigError):
        configs_from_values(parse_config_text("n_fft = 511\n"))
    with pytest.raises(InvalidConfigError):
        configs_from_values(parse_config_text("loss_kind = huber\n"))


def test_config_text_echoes_every_field():
    text = config_text(ModelConfig(), TrainConfig())
    for key in ("n_fft", "hop", "tau", "context", "full_hidden", "sub_hidden",
                "ttrans_hidden", "ttrans_fc", "ftrans_conv1d_kernel",
                "enable_f_trans", "enable_t_trans", "loss_weights", "epochs",
                "steps_per_epoch", "batch_size", "lr_switch_epoch", "seed",
                "lr_initial", "lr_after", "clip_seconds", "snr_range_db",
                "loss_kind", "drop_band_groups"):
        assert any(line.startswith(f"{key} = ") for line in text.splitlines()), key


def test_save_load_round_trip(tmp_path):
    model_cfg = ModelConfig(n_fft=256, hop=128, tau=1, context=3,
                            full_hidden=32, sub_hidden=24, ttrans_hidden=129,
                            ttrans_fc=129, enable_f_trans=False,
                            loss_weights=(0.5, 1.0, 2.0))
    train_cfg = TrainConfig(epochs=5, batch_size=3, lr_initial=0.0007,
                            snr_range_db=(-5.0, 15.0), seed=9)
    path = tmp_path / "run.cfg"
    save_config(path, model_cfg, train_cfg)
    loaded_model, loaded_train = load_config(path)
    assert loaded_model == model_cfg
    assert loaded_train == train_cfg
    # a second trip writes the identical file
    path2 = tmp_path / "run2.cfg"
    save_config(path2, loaded_model, loaded_train)
    assert path.read_text() == path2.read_text()


def test_float_values_round_trip_exactly(tmp_path):
    train_cfg = TrainConfig(lr_initial=1e-3 / 3.0, clip_seconds=0.7331)
    path = tmp_path / "precise.cfg"
    save_config(path, ModelConfig(), train_cfg)
    _, loaded = load_config(path)
    assert loaded.lr_initial == train_cfg.lr_initial
    assert loaded.clip_seconds == train_cfg.clip_seconds
