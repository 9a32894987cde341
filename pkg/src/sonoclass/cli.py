"""Command-line front end.

Subcommands: synth, split, extract, train, evaluate, gridsearch, compare.
Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import log_gabor, pipeline
from .errors import ConfigError, SonoclassError
from .model_io import load_model, save_model
from .spectrogram import log_spectrogram
from .audio_io import load_wav, peak_normalize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NONCONVERGENCE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(p: argparse.ArgumentParser, manifest_required=True):
    p.add_argument("--manifest", required=manifest_required, help="dataset manifest (TSV or JSON)")
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--method", choices=pipeline.METHODS)
    p.add_argument("--scale", type=int, help="scale for method 'single'")
    p.add_argument("--orientation", type=int, help="orientation for method 'single'")
    p.add_argument("--top-k", type=int, dest="top_k", help="MI-selected feature count")
    p.add_argument("--c", type=float, help="SVM box constraint")
    p.add_argument("--gamma", type=float, help="RBF kernel width")
    p.add_argument("--seed", type=int)
    p.add_argument("--cache-dir", dest="cache_dir", help="feature cache directory")


def _config_from_args(args) -> pipeline.RunConfig:
    overrides = {}
    for attr, key in (
        ("method", "method"), ("scale", "single.scale"),
        ("orientation", "single.orientation"), ("top_k", "mi.top_k"),
        ("c", "svm.c"), ("gamma", "svm.gamma"), ("seed", "seed"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = str(value)
    return pipeline.load_config(getattr(args, "config", None), overrides)


def _cmd_synth(args) -> int:
    manifest = pipeline.generate_corpus(
        args.out,
        clips_per_class=args.clips_per_class,
        duration_s=args.duration,
        sample_rate=args.sample_rate,
        seed=args.seed if args.seed is not None else 0,
    )
    manifest_path = Path(args.out) / "manifest.tsv"
    pipeline.write_manifest(manifest_path, manifest)
    print(f"wrote {len(manifest.entries)} clips in {len(manifest.classes)} classes")
    print(f"manifest: {manifest_path}")
    return EXIT_OK


def _cmd_split(args) -> int:
    manifest = pipeline.read_manifest(args.manifest)
    split = pipeline.auto_split(
        manifest,
        train_fraction=args.train_fraction,
        seed=args.seed if args.seed is not None else 0,
    )
    pipeline.write_manifest(args.out, split)
    n_train = len(split.rows("train"))
    n_test = len(split.rows("test"))
    print(f"split {len(split.entries)} entries: {n_train} train / {n_test} test")
    return EXIT_OK


def _cmd_extract(args) -> int:
    config = _config_from_args(args)
    manifest = pipeline.read_manifest(args.manifest)

    if args.dump_spectrograms:
        out_dir = Path(args.dump_spectrograms)
        out_dir.mkdir(parents=True, exist_ok=True)
        params = config.stft_params()
        for e in manifest.entries:
            spec = log_spectrogram(peak_normalize(load_wav(e.path)), params)
            np.savetxt(out_dir / (Path(e.path).stem + ".csv"),
                       spec.values, delimiter=",", fmt="%.10g")
        print(f"spectrogram CSVs -> {out_dir}")
    if args.dump_masks:
        out_dir = Path(args.dump_masks)
        out_dir.mkdir(parents=True, exist_ok=True)
        bank = log_gabor.build_bank(
            (config.fixed_rows, config.fixed_cols), config.gabor_params()
        )
        for scale in range(1, config.gabor_scales + 1):
            for orientation in range(1, config.gabor_orientations + 1):
                np.savetxt(out_dir / f"mask_s{scale}_o{orientation}.csv",
                           bank.mask(scale, orientation), delimiter=",", fmt="%.10g")
        print(f"filter mask CSVs -> {out_dir}")

    result = pipeline.extract_features(manifest, config, cache_dir=args.cache_dir)
    for name, matrix in (("train", result.train), ("test", result.test)):
        if matrix is not None:
            print(f"{name}: {matrix.n_samples} x {matrix.n_features}")
    print(f"cache: {result.stats.hits} hits, {result.stats.misses} misses")
    if args.out:
        payload = {"class_names": np.array(result.class_names)}
        if result.train is not None:
            payload["train_values"] = result.train.values
            payload["train_labels"] = result.train.labels
        if result.test is not None:
            payload["test_values"] = result.test.values
            payload["test_labels"] = result.test.labels
        np.savez(args.out, **payload)
        print(f"features -> {args.out}")
    return EXIT_OK


def _cmd_train(args) -> int:
    config = _config_from_args(args)
    manifest = pipeline.read_manifest(args.manifest)
    model = pipeline.train_model(manifest, config, cache_dir=args.cache_dir)
    save_model(args.out, model)
    print(f"trained {len(model.ovo.pair_models)} pair models "
          f"over {len(model.class_names)} classes -> {args.out}")
    if args.dump_mi_scores and model.selected_scores is not None:
        lines = ["feature_index,score_bits"]
        lines += [
            f"{int(i)},{s:.12g}"
            for i, s in zip(model.selected_indices, model.selected_scores)
        ]
        Path(args.dump_mi_scores).write_text("\n".join(lines) + "\n")
        print(f"MI scores -> {args.dump_mi_scores}")
    if not model.ovo.converged:
        print("warning: at least one pair solver did not converge", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    model = load_model(args.model)
    manifest = pipeline.read_manifest(args.manifest)
    report = pipeline.evaluate_model(model, manifest, cache_dir=args.cache_dir)
    text = pipeline.evaluation_text(report)
    if args.out:
        Path(str(args.out) + ".csv").write_text(pipeline.evaluation_csv(report))
        Path(str(args.out) + ".txt").write_text(text)
        print(f"report -> {args.out}.csv / {args.out}.txt")
    print(text, end="")
    return EXIT_OK


def _cmd_gridsearch(args) -> int:
    config = _config_from_args(args)
    manifest = pipeline.read_manifest(args.manifest)
    best, table = pipeline.grid_search(manifest, config, cache_dir=args.cache_dir)
    if args.out:
        lines = ["c,gamma,cv_accuracy"]
        lines += [f"{c:.10g},{g:.10g},{acc:.6f}" for c, g, acc in table]
        Path(args.out).write_text("\n".join(lines) + "\n")
        print(f"CV table -> {args.out}")
    best_acc = max(acc for _, _, acc in table)
    print(f"best: c={best.c:.10g} gamma={best.gamma:.10g} cv_accuracy={best_acc:.4f}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = _config_from_args(args)
    manifest = pipeline.read_manifest(args.manifest)
    result = pipeline.compare_methods(manifest, config, cache_dir=args.cache_dir)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "single_grid.csv").write_text(pipeline.single_grid_csv(result))
    (out_dir / "comparison.csv").write_text(pipeline.comparison_csv(result))
    (out_dir / "compare.txt").write_text(pipeline.comparison_text(result))
    print(pipeline.comparison_text(result), end="")
    print(f"reports -> {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sonoclass",
                     description="Spectrogram-texture sound classification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--clips-per-class", type=int, default=60, dest="clips_per_class")
    p.add_argument("--duration", type=float, default=1.0)
    p.add_argument("--sample-rate", type=int, default=16000, dest="sample_rate")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=_cmd_synth)

    p = sub.add_parser("split", help="stratified train/test assignment")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--train-fraction", type=float, default=pipeline.TRAIN_FRACTION,
                   dest="train_fraction")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=_cmd_split)

    p = sub.add_parser("extract", help="compute (and cache) feature matrices")
    _add_common(p)
    p.add_argument("--out", help="write features to this .npz file")
    p.add_argument("--dump-spectrograms", dest="dump_spectrograms",
                   help="also write per-clip log-spectrogram CSVs here")
    p.add_argument("--dump-masks", dest="dump_masks",
                   help="also write the filter-bank masks as CSVs here")
    p.set_defaults(run=_cmd_extract)

    p = sub.add_parser("train", help="train and persist a model")
    _add_common(p)
    p.add_argument("--out", default="model.txt", help="model file path")
    p.add_argument("--dump-mi-scores", dest="dump_mi_scores",
                   help="write selected-feature MI scores as CSV")
    p.set_defaults(run=_cmd_train)

    p = sub.add_parser("evaluate", help="score a trained model on a manifest")
    p.add_argument("model", help="model file from 'train'")
    p.add_argument("--manifest", required=True)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--out", help="report path prefix (.csv and .txt appended)")
    p.set_defaults(run=_cmd_evaluate)

    p = sub.add_parser("gridsearch", help="cross-validated (C, gamma) search")
    _add_common(p)
    p.add_argument("--out", help="CV table CSV path")
    p.set_defaults(run=_cmd_gridsearch)

    p = sub.add_parser("compare", help="single-filter grid plus method comparison")
    _add_common(p)
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(run=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SonoclassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
