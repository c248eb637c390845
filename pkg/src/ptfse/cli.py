"""Command-line entry point: synth, train, enhance, evaluate, gradcheck,
params, specdump.

Exit codes: 0 success, 1 usage error, 2 data or contract error,
3 verification failure.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .configfile import config_text, load_config
from .errors import EnhancerError
from .figures import save_spectrogram_png
from .masking import band_partition
from .model import ModelConfig, param_breakdown
from .model.network import look_ahead_ms, look_ahead_samples
from .pipeline import TrainConfig, enhance, evaluate, train
from .signal import (CLIP_KINDS, PIPELINE_SAMPLE_RATE, magnitude, read_wav,
                     stft, synth_clip, write_wav)
from .verification import GRADCHECK_SUITES, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFICATION = 3

SPECDUMP_FLOOR_DB = -80.0

_NOISE_KINDS = tuple(k for k in CLIP_KINDS if k.startswith("noise_"))


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    data errors, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_configs(args):
    if getattr(args, "config", None):
        model_cfg, train_cfg = load_config(args.config)
    else:
        model_cfg, train_cfg = ModelConfig(), TrainConfig()
    if getattr(args, "no_f_trans", False):
        model_cfg = replace(model_cfg, enable_f_trans=False)
    if getattr(args, "no_t_trans", False):
        model_cfg = replace(model_cfg, enable_t_trans=False)
    if getattr(args, "loss", None):
        model_cfg = replace(model_cfg, loss_kind=args.loss)
        train_cfg = replace(train_cfg, loss_kind=args.loss)
    return model_cfg, train_cfg


def cmd_synth(args) -> int:
    out_dir = Path(args.out_dir)
    clean_dir, noise_dir = out_dir / "clean", out_dir / "noise"
    clean_dir.mkdir(parents=True, exist_ok=True)
    noise_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for i in range(args.clips):
        name = f"clip{i:03d}"
        clean_seed = args.seed + i
        noise_seed = args.seed + 1000 + i
        noise_kind = _NOISE_KINDS[i % len(_NOISE_KINDS)]
        clean = synth_clip("speechlike", args.seconds, seed=clean_seed)
        noise = synth_clip(noise_kind, args.seconds, seed=noise_seed)
        write_wav(clean_dir / f"{name}.wav", clean)
        write_wav(noise_dir / f"{name}.wav", noise)
        manifest.append(f"clean/{name}.wav kind=speechlike seed={clean_seed} "
                        f"samples={len(clean)}")
        manifest.append(f"noise/{name}.wav kind={noise_kind} seed={noise_seed} "
                        f"samples={len(noise)}")
    manifest_path = out_dir / "manifest.txt"
    manifest_path.write_text("\n".join(manifest) + "\n")
    print(f"wrote {args.clips} clean + {args.clips} noise clips under {out_dir}")
    print(f"manifest: {manifest_path}")
    return EXIT_OK


def cmd_train(args) -> int:
    model_cfg, train_cfg = _load_configs(args)
    print("# effective config")
    sys.stdout.write(config_text(model_cfg, train_cfg))
    report = train(model_cfg, train_cfg, args.data_dir, args.out)
    if report.loss_trace:
        print(f"first loss {report.loss_trace[0]:.10g}  "
              f"final loss {report.loss_trace[-1]:.10g}")
    print(f"checkpoint: {report.checkpoint_path}")
    print(f"report: {report.report_path}")
    if report.curve_path:
        print(f"loss curve: {report.curve_path}")
    print(f"elapsed: {report.elapsed_seconds:.1f}s")
    return EXIT_OK


def cmd_enhance(args) -> int:
    model_cfg, _ = _load_configs(args)
    noisy = read_wav(args.in_path)
    out = enhance(noisy, args.checkpoint, model_cfg)
    write_wav(args.out, out)
    print(f"enhanced {args.in_path} -> {args.out} "
          f"(latency {look_ahead_samples(model_cfg)} samples = "
          f"{look_ahead_ms(model_cfg):.1f} ms)")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    est = read_wav(args.est)
    ref = read_wav(args.ref)
    print(evaluate(est, ref).line())
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    status = EXIT_OK
    names = sorted(GRADCHECK_SUITES) if args.module == "all" else [args.module]
    for name in names:
        err, threshold = run_suite(name, seeds=args.seeds)
        verdict = "ok" if err <= threshold else "FAIL"
        print(f"{name}: max relative error {err:.3e} "
              f"(threshold {threshold:g}) {verdict}")
        if err > threshold:
            status = EXIT_VERIFICATION
    return status


def cmd_params(args) -> int:
    model_cfg, _ = _load_configs(args)
    breakdown = param_breakdown(model_cfg)
    for block, count in breakdown.items():
        print(f"{block:8s} {count:>10d}")
    print(f"{'total':8s} {sum(breakdown.values()):>10d}")
    return EXIT_OK


def cmd_specdump(args) -> int:
    model_cfg, _ = _load_configs(args)
    w = read_wav(args.in_path)
    mag = magnitude(stft(w, model_cfg.n_fft, model_cfg.hop))
    floor = 10.0 ** (SPECDUMP_FLOOR_DB / 20.0)
    db = 20.0 * np.log10(np.maximum(mag.values, floor))
    out_csv = Path(args.out)
    np.savetxt(out_csv, db, fmt="%.4f", delimiter=",")
    out_png = out_csv.with_suffix(".png")
    save_spectrogram_png(out_png, db, model_cfg.hop, PIPELINE_SAMPLE_RATE)
    print(f"spectrogram: {db.shape[0]} bins x {db.shape[1]} frames")
    print(f"csv: {out_csv}")
    print(f"png: {out_png}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptfse",
                     description="Full-band/sub-band speech enhancement "
                                 "with frequency and temporal transforms.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a deterministic WAV corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--clips", type=int, default=8)
    p.add_argument("--seconds", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a model on a corpus directory")
    p.add_argument("--config", default=None)
    p.add_argument("--data-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-f-trans", action="store_true")
    p.add_argument("--no-t-trans", action="store_true")
    p.add_argument("--loss", choices=("pp_cirm", "mse"), default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("enhance", help="denoise one WAV file")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--no-f-trans", action="store_true")
    p.add_argument("--no-t-trans", action="store_true")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("evaluate", help="score an enhanced file against its reference")
    p.add_argument("--ref", required=True)
    p.add_argument("--est", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gradcheck", help="finite-difference gradient suite")
    p.add_argument("--module", choices=sorted(GRADCHECK_SUITES) + ["all"],
                   default="all")
    p.add_argument("--seeds", type=int, default=20)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("params", help="print per-block parameter counts")
    p.add_argument("--config", default=None)
    p.add_argument("--no-f-trans", action="store_true")
    p.add_argument("--no-t-trans", action="store_true")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("specdump", help="dump a dB spectrogram as CSV and PNG")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_specdump)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except EnhancerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
