"""Command-line interface.

Subcommands: preprocess, extract, train, eval, ablate, annotate-serve, synth.
Experiment runs are driven by a JSON config file (see ExperimentConfig for
the schema); --seed / --dataset-root / --experiment override the file.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from pcgkit.features import FeatureKind, FeatureParams
from pcgkit.pipeline import (
    ExperimentConfig,
    ablate_window,
    build_manifest,
    generate_toy_dataset,
    load_split_features,
    prepare_manifest,
    run_experiment,
)
from pcgkit.types import Task

_DATASET_TASKS = {"2022": Task.MURMUR_2022, "2016": Task.ABNORMAL_2016}


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="experiment config JSON file")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--dataset-root", default=None, help="override the dataset root")
    p.add_argument(
        "--experiment", choices=("e1", "e2", "e3", "e4"), default=None, help="override the experiment"
    )


def _load_config(args) -> ExperimentConfig:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.dataset_root is not None:
        overrides["dataset_root"] = args.dataset_root
    if args.experiment is not None:
        overrides["experiment"] = args.experiment
    return ExperimentConfig.from_file(args.config, **overrides)


def cmd_preprocess(args) -> int:
    manifest = build_manifest(
        args.dataset_root,
        _DATASET_TASKS[args.dataset],
        args.window,
        args.workdir,
        relabel_file=args.relabels,
    )
    manifest.save(Path(args.workdir) / "manifest.jsonl")
    print(f"segments: {len(manifest.ok_entries())} ok, stats: {manifest.stats}")
    print(f"class counts: {manifest.class_counts()}")
    return 0


def cmd_extract(args) -> int:
    config = _load_config(args)
    if args.features:
        config = ExperimentConfig(**{**asdict(config), "feature": args.features})
    manifest = prepare_manifest(config)
    for split in ("train", "val", "test"):
        x, y, _ = load_split_features(config, manifest, split)
        print(f"{split}: {x.shape[0]} maps of shape {tuple(x.shape[1:])}")
    return 0


def cmd_train(args) -> int:
    config = _load_config(args)
    result = run_experiment(config)
    print(f"best epoch: {result.best_epoch}, wall: {result.wall_seconds:.1f}s")
    print(result.report.to_json())
    if result.voting_report is not None:
        print("voting report:")
        print(result.voting_report.to_json())
    print(f"checkpoint: {result.checkpoint_path}")
    print(f"report: {result.report_path}")
    return 0


def cmd_eval(args) -> int:
    from pcgkit.metrics import compute_report
    from pcgkit.nn import load_checkpoint
    from pcgkit.pipeline import DatasetManifest
    from pcgkit.types import ClassLabel

    model, _, extra = load_checkpoint(args.checkpoint)
    config = ExperimentConfig(**extra["config"])
    manifest = prepare_manifest(config)
    x, y, entries = load_split_features(config, manifest, args.split)
    classes = manifest.classes_in_use()
    probs = np.concatenate(
        [model.forward(x[i : i + config.batch_size]) for i in range(0, len(x), config.batch_size)]
    )
    preds = [classes[i] for i in probs.argmax(axis=1)]
    truths = [classes[i] for i in y]
    report = compute_report(preds, truths, classes, scores=probs, extra={"split": args.split})
    print(report.to_json())
    return 0


def cmd_ablate(args) -> int:
    config = _load_config(args)
    sizes = tuple(int(s) for s in args.sizes.split(","))
    rows = ablate_window(config, sizes)
    print(f"{'window':>8} {'accuracy':>9} {'precision':>10} {'recall':>8} {'f1':>8}  best")
    for row in rows:
        mark = "*" if row.is_best else ""
        print(
            f"{row.window_seconds:>7}s {row.accuracy:>9.4f} {row.precision:>10.4f} "
            f"{row.recall:>8.4f} {row.f1:>8.4f}  {mark}"
        )
    return 0


def cmd_annotate_serve(args) -> int:
    from pcgkit.annotator import serve

    serve(args.workdir, host=args.host, port=args.port, ui_dir=args.ui_dir)
    return 0


def cmd_synth(args) -> int:
    root = generate_toy_dataset(
        args.out, n_patients=args.patients, seconds=args.seconds, fs=args.fs, seed=args.seed
    )
    print(f"synthetic dataset written to {root}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcgkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="filter, segment, normalize a dataset tree")
    p.add_argument("--dataset-root", required=True)
    p.add_argument("--dataset", choices=("2022", "2016"), required=True)
    p.add_argument("--window", type=int, default=4, help="segment length in seconds")
    p.add_argument("--workdir", required=True, help="output directory for the segment store")
    p.add_argument("--relabels", default=None, help="JSONL relabel file from the annotator export")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("extract", help="precompute feature maps for every split")
    _add_config_args(p)
    p.add_argument("--features", choices=("stft", "mfcc", "wst"), default=None)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="run one experiment end to end")
    _add_config_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", choices=("train", "val", "test"), default="test")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="segment-size ablation study")
    _add_config_args(p)
    p.add_argument("--sizes", default="1,3,4,5", help="comma-separated window sizes in seconds")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("annotate-serve", help="serve the segment review API/UI")
    p.add_argument("--workdir", required=True, help="segment store directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8377)
    p.add_argument("--ui-dir", default=None, help="static directory with the built review UI")
    p.set_defaults(func=cmd_annotate_serve)

    p = sub.add_parser("synth", help="generate the synthetic three-class toy dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--patients", type=int, default=100)
    p.add_argument("--seconds", type=float, default=6.0)
    p.add_argument("--fs", type=int, default=4000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
