"""End-to-end CLI runs: every subcommand, exit codes, and artifacts."""

import numpy as np
import pytest

from ptfse.cli import main
from ptfse.configfile import save_config
from ptfse.metrics import si_sdr
from ptfse.model import ModelConfig, param_breakdown
from ptfse.pipeline import TrainConfig
from ptfse.signal import read_wav, synth_clip, write_wav

def _mini_configs():
    model_cfg = ModelConfig(n_fft=32, hop=16, tau=1, context=1, full_hidden=8,
                            sub_hidden=6, ttrans_hidden=17, ttrans_fc=17)
    train_cfg = TrainConfig(epochs=2, steps_per_epoch=2, batch_size=2,
                            clip_seconds=0.1, snr_range_db=(0.0, 20.0), seed=3)
    return model_cfg, train_cfg


@pytest.fixture(scope="module")
def cli_workspace(tmp_path_factory):
    """synth -> train once; later tests reuse the corpus and checkpoint."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    assert main(["synth", "--out-dir", str(data), "--clips", "4",
                 "--seconds", "0.6", "--seed", "30"]) == 0
    cfg_path = root / "mini.cfg"
    save_config(cfg_path, *_mini_configs())
    run = root / "run"
    assert main(["train", "--config", str(cfg_path), "--data-dir", str(data),
                 "--out", str(run)]) == 0
    return root, data, cfg_path, run


def test_synth_writes_corpus_and_manifest(cli_workspace):
    _, data, _, _ = cli_workspace
    cleans = sorted((data / "clean").glob("*.wav"))
    noises = sorted((data / "noise").glob("*.wav"))
    assert len(cleans) == len(noises) == 4
    manifest = (data / "manifest.txt").read_text().splitlines()
    assert len(manifest) == 8
    assert manifest[0] == "clean/clip000.wav kind=speechlike seed=30 samples=9600"
    kinds = [line.split("kind=")[1].split()[0]
             for line in manifest if line.startswith("noise/")]
    assert kinds == ["noise_white", "noise_pink", "noise_babble", "noise_white"]
    w = read_wav(cleans[0])
    assert len(w) == 9600 and w.sample_rate == 16000


def test_synth_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["synth", "--out-dir", str(d), "--clips", "2",
                     "--seconds", "0.3", "--seed", "7"]) == 0
    for rel in ("clean/clip000.wav", "noise/clip001.wav", "manifest.txt"):
        assert (a / rel).read_bytes() == (b / rel).read_bytes()


def test_train_outputs_and_stdout(cli_workspace, capfd):
    root, data, cfg_path, _ = cli_workspace
    run2 = root / "run2"
    assert main(["train", "--config", str(cfg_path), "--data-dir", str(data),
                 "--out", str(run2)]) == 0
    out = capfd.readouterr().out
    assert "# effective config" in out
    assert "n_fft = 32" in out
    assert "first loss" in out and "final loss" in out
    assert "checkpoint:" in out
    assert (run2 / "checkpoint.ptfse").is_file()
    assert (run2 / "report.txt").is_file()
    assert (run2 / "loss_curve.png").is_file()
    # same config and seed: identical checkpoint to the fixture run
    assert (run2 / "checkpoint.ptfse").read_bytes() == \
        (cli_workspace[3] / "checkpoint.ptfse").read_bytes()


def test_train_variant_toggles_param_counts(cli_workspace, capfd):
    _, data, cfg_path, _ = cli_workspace
    model_cfg, _ = _mini_configs()
    assert main(["params", "--config", str(cfg_path)]) == 0
    full_out = capfd.readouterr().out
    assert main(["params", "--config", str(cfg_path), "--no-f-trans",
                 "--no-t-trans"]) == 0
    base_out = capfd.readouterr().out

    def total(text):
        return int([line for line in text.splitlines()
                    if line.startswith("total")][0].split()[-1])

    full_total, base_total = total(full_out), total(base_out)
    breakdown = param_breakdown(model_cfg)
    assert full_total == sum(breakdown.values())
    assert base_total == breakdown["gfull"] + breakdown["gsub"]
    assert "ftrans" in full_out and "ftrans" not in base_out


def test_enhance_and_evaluate_round(cli_workspace, tmp_path, capfd):
    _, _, cfg_path, run = cli_workspace
    clean = synth_clip("speechlike", 0.5, seed=77)
    noise = synth_clip("noise_white", 0.5, seed=78)
    from ptfse.signal import mix_at_snr
    noisy, _ = mix_at_snr(clean, noise, 5.0)
    noisy_path = tmp_path / "noisy.wav"
    clean_path = tmp_path / "clean.wav"
    out_path = tmp_path / "enhanced.wav"
    write_wav(noisy_path, noisy)
    write_wav(clean_path, clean)

    assert main(["enhance", "--config", str(cfg_path),
                 "--checkpoint", str(run / "checkpoint.ptfse"),
                 "--in", str(noisy_path), "--out", str(out_path)]) == 0
    out = capfd.readouterr().out
    assert "latency 16 samples = 1.0 ms" in out
    enhanced = read_wav(out_path)
    assert len(enhanced) == len(noisy)

    assert main(["evaluate", "--ref", str(clean_path),
                 "--est", str(out_path)]) == 0
    line = capfd.readouterr().out.strip()
    assert line.startswith("si_sdr_db=") and " stoi=" in line
    reported = float(line.split()[0].split("=")[1])
    # evaluate reads the WAVs back, so compare against the quantized files
    expected = si_sdr(read_wav(out_path).samples, read_wav(clean_path).samples)
    assert reported == pytest.approx(expected, abs=5e-7)


def test_gradcheck_all_modules(capfd):
    assert main(["gradcheck", "--module", "all", "--seeds", "2"]) == 0
    out = capfd.readouterr().out.splitlines()
    assert len(out) == 3
    for line in out:
        assert "max relative error" in line and line.endswith("ok")


def test_gradcheck_single_module(capfd):
    assert main(["gradcheck", "--module", "masking", "--seeds", "2"]) == 0
    out = capfd.readouterr().out
    assert out.startswith("masking:") and "ok" in out


def test_specdump_grid_and_png(cli_workspace, tmp_path, capfd):
    w = synth_clip("speechlike", 1.0, seed=80)
    wav_path = tmp_path / "probe.wav"
    write_wav(wav_path, w)
    csv_path = tmp_path / "probe.csv"
    assert main(["specdump", "--in", str(wav_path),
                 "--out", str(csv_path)]) == 0
    out = capfd.readouterr().out
    assert "257 bins x 63 frames" in out
    grid = np.loadtxt(csv_path, delimiter=",")
    assert grid.shape == (257, 63)
    assert np.all(grid >= -80.0 - 1e-9)
    assert (tmp_path / "probe.png").is_file()


def test_usage_errors_exit_one(capfd):
    assert main([]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["train", "--data-dir", "/nonexistent"]) == 1  # missing --out
    capfd.readouterr()


def test_data_errors_exit_two(cli_workspace, tmp_path, capfd):
    _, _, cfg_path, run = cli_workspace
    missing = tmp_path / "missing.wav"
    assert main(["enhance", "--config", str(cfg_path),
                 "--checkpoint", str(run / "checkpoint.ptfse"),
                 "--in", str(missing), "--out", str(tmp_path / "x.wav")]) == 2
    assert main(["train", "--config", str(cfg_path),
                 "--data-dir", str(tmp_path / "nodata"),
                 "--out", str(tmp_path / "r")]) == 2
    # checkpoint/config mismatch is a contract violation, also exit 2
    assert main(["enhance", "--checkpoint", str(run / "checkpoint.ptfse"),
                 "--in", str(missing), "--out", str(tmp_path / "y.wav")]) == 2
    err = capfd.readouterr().err
    assert "error:" in err


def test_evaluate_short_clip_exits_two(tmp_path, capfd):
    w = synth_clip("speechlike", 0.2, seed=81)  # too short for the metric
    p = tmp_path / "tiny.wav"
    write_wav(p, w)
    assert main(["evaluate", "--ref", str(p), "--est", str(p)]) == 2
    assert "error:" in capfd.readouterr().err
