"""Experiment configuration, training loop, evaluation, and the window
ablation study."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from pcgkit.features import (
    FeatureKind,
    FeatureParams,
    extract_feature_map,
    load_feature_map,
    save_feature_map,
)
from pcgkit.metrics import ConfusionMatrix, MetricReport, compute_report, vote
from pcgkit.nn import (
    AdamState,
    Model,
    adam_step,
    cnn1d_spec,
    crnn_spec,
    cross_entropy,
    cross_entropy_grad,
    lstm_rnn_spec,
    save_checkpoint,
    xavier_init,
)
from pcgkit.pipeline.manifest import (
    DatasetManifest,
    apply_relabels,
    build_manifest,
    load_relabel_file,
    split_patients,
)
from pcgkit.pipeline.sampling import downsample_majority, weighted_sampler
from pcgkit.preprocess import SegmentStore
from pcgkit.types import TASK_CLASSES, ClassLabel, Task

EXPERIMENTS = ("e1", "e2", "e3", "e4")

_PRESET_BUILDERS = {
    "cnn1d": cnn1d_spec,
    "lstm_rnn": lstm_rnn_spec,
    "crnn": crnn_spec,
}


@dataclass
class ExperimentConfig:
    """Declarative description of one run; serializable to a JSON file."""

    experiment: str
    dataset_root: str
    workdir: str
    window_seconds: int = 4
    feature: str = "wst"
    feature_params: dict = field(default_factory=dict)
    log_scatter: bool = True
    model: str = "cnn1d"
    model_overrides: dict = field(default_factory=dict)
    batch_size: int = 126
    learning_rate: float = 3e-5
    epochs: int = 30
    seed: int = 0
    weighted_sampling: bool = True
    downsample: dict = field(default_factory=dict)  # label -> kept count
    voting: bool = False
    relabel_file: str | None = None
    split_ratios: tuple[float, float, float] = (0.70, 0.15, 0.15)

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}")
        if self.feature not in ("stft", "mfcc", "wst"):
            raise ValueError(f"unknown feature kind {self.feature!r}")
        if self.model not in _PRESET_BUILDERS:
            raise ValueError(f"unknown model preset {self.model!r}")
        if self.experiment == "e3" and not self.relabel_file:
            raise ValueError("experiment e3 needs a relabel file (cleaned dataset)")

    @property
    def task(self) -> Task:
        return Task.ABNORMAL_2016 if self.experiment == "e4" else Task.MURMUR_2022

    @property
    def feature_kind(self) -> FeatureKind:
        return FeatureKind(self.feature)

    def make_feature_params(self) -> FeatureParams:
        return FeatureParams(**self.feature_params)

    def to_file(self, path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text())
        data.update(overrides)
        if "split_ratios" in data:
            data["split_ratios"] = tuple(data["split_ratios"])
        return cls(**data)


@dataclass
class ExperimentResult:
    report: MetricReport
    voting_report: MetricReport | None
    checkpoint_path: str
    predictions_path: str
    report_path: str
    best_epoch: int
    wall_seconds: float


def prepare_manifest(config: ExperimentConfig) -> DatasetManifest:
    """Build (or reuse) the segment store and manifest for a config, then
    apply experiment-specific filtering, balancing, and the patient split.

    The cached manifest keeps original labels; relabels are applied per run
    so one workdir can serve e1 and e3 configs without going stale.
    """
    workdir = Path(config.workdir)
    manifest_path = workdir / "manifest.jsonl"
    if manifest_path.exists():
        manifest = DatasetManifest.load(manifest_path)
        if manifest.dataset != config.task.value or manifest.window_seconds != config.window_seconds:
            manifest = None
    else:
        manifest = None
    if manifest is None:
        manifest = build_manifest(config.dataset_root, config.task, config.window_seconds, workdir)
        manifest.save(manifest_path)
    if config.relabel_file:
        apply_relabels(manifest, load_relabel_file(config.relabel_file))

    if config.experiment == "e2":
        manifest = manifest.filtered({ClassLabel.UNKNOWN})
    if config.downsample:
        targets = {ClassLabel(k): int(v) for k, v in config.downsample.items()}
        manifest = downsample_majority(manifest, targets, config.seed)
    return split_patients(manifest, config.split_ratios, config.seed)


def _feature_dir(config: ExperimentConfig, params: FeatureParams) -> Path:
    return Path(config.workdir) / "features" / f"{config.feature}-{params.hash_hex(config.feature_kind)}"


def load_split_features(config: ExperimentConfig, manifest: DatasetManifest, split: str):
    """Return (X, y, entries) for one split, extracting or reusing cached
    per-segment feature files."""
    params = config.make_feature_params()
    feat_dir = _feature_dir(config, params)
    store = SegmentStore(manifest.store_root)
    classes = manifest.classes_in_use()
    class_index = {c.value: i for i, c in enumerate(classes)}
    entries = manifest.split_entries(split)
    maps = []
    labels = []
    for entry in entries:
        path = feat_dir / f"{entry.segment_id}.pft"
        if path.exists():
            fm = load_feature_map(path)
        else:
            samples = store.load_samples(entry.segment_id)
            fm = extract_feature_map(
                samples, entry.sample_rate_hz, config.feature_kind, params, config.log_scatter
            )
            save_feature_map(path, fm)
        maps.append(fm.data.astype(np.float32))
        labels.append(class_index[entry.effective_label])
    x = np.stack(maps) if maps else np.zeros((0, 0, 0), dtype=np.float32)
    return x, np.array(labels, dtype=int), entries


def _build_model(config: ExperimentConfig, input_shape, n_classes: int) -> Model:
    builder = _PRESET_BUILDERS[config.model]
    spec = builder(tuple(input_shape), n_classes, **config.model_overrides)
    return xavier_init(spec, config.seed)


def _evaluate(model: Model, x: np.ndarray, batch: int) -> np.ndarray:
    probs = [model.forward(x[i : i + batch], train=False) for i in range(0, len(x), batch)]
    return np.concatenate(probs) if probs else np.zeros((0, 0))


def vote_by_group(group_keys, preds, truths, classes):
    """Collapse segment-level labels to one vote per patient+location group.

    Group truths are voted the same way, so re-labeled segments inside one
    recording resolve consistently. Returns (voted_preds, voted_truths).
    """
    groups: dict[str, dict] = {}
    for key, pred, truth in zip(group_keys, preds, truths):
        bucket = groups.setdefault(key, {"preds": [], "truths": []})
        bucket["preds"].append(pred)
        bucket["truths"].append(truth)
    voted_preds = [vote(g["preds"], classes) for g in groups.values()]
    voted_truths = [vote(g["truths"], classes) for g in groups.values()]
    return voted_preds, voted_truths


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Train on the train split, select the best epoch by validation macro
    F1, and report the test metrics once; optionally also the voted metrics."""
    t0 = time.time()
    workdir = Path(config.workdir)
    manifest = prepare_manifest(config)
    classes = manifest.classes_in_use()

    x_train, y_train, train_entries = load_split_features(config, manifest, "train")
    x_val, y_val, _ = load_split_features(config, manifest, "val")
    x_test, y_test, test_entries = load_split_features(config, manifest, "test")
    if len(x_train) == 0 or len(x_val) == 0 or len(x_test) == 0:
        raise ValueError("every split needs at least one segment")

    test_ids = {e.segment_id for e in test_entries}
    train_ids = [e.segment_id for e in train_entries]

    model = _build_model(config, x_train.shape[1:], len(classes))
    adam = AdamState.for_model(model)
    sampler = weighted_sampler(manifest, "train", config.seed) if config.weighted_sampling else None
    shuffle_rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0xE90C]))

    best_f1 = -1.0
    best_epoch = -1
    best_params = model.clone_parameters()
    for epoch in range(config.epochs):
        order = sampler.draw(len(train_ids)) if sampler else shuffle_rng.permutation(len(train_ids))
        for start in range(0, len(order), config.batch_size):
            idx = order[start : start + config.batch_size]
            assert not any(train_ids[i] in test_ids for i in idx), "test segment leaked into training"
            probs = model.forward(x_train[idx], train=True)
            model.backward(cross_entropy_grad(probs, y_train[idx]))
            adam_step(model, adam, config.learning_rate)

        val_probs = _evaluate(model, x_val, config.batch_size)
        val_preds = [classes[i] for i in val_probs.argmax(axis=1)]
        val_truths = [classes[i] for i in y_val]
        val_report = compute_report(val_preds, val_truths, classes)
        val_f1 = val_report.precision_recall_f1["macro"]["f1"]
        if val_f1 > best_f1:
            best_f1 = val_f1
            best_epoch = epoch
            best_params = model.clone_parameters()

    model.load_parameters(best_params)
    test_probs = _evaluate(model, x_test, config.batch_size)
    test_preds = [classes[i] for i in test_probs.argmax(axis=1)]
    test_truths = [classes[i] for i in y_test]
    report = compute_report(
        test_preds,
        test_truths,
        classes,
        scores=test_probs,
        extra={"experiment": config.experiment, "seed": config.seed, "best_epoch": best_epoch},
    )

    voting_report = None
    if config.voting:
        keys = [f"{e.patient_id}|{e.location}" for e in test_entries]
        voted_preds, voted_truths = vote_by_group(keys, test_preds, test_truths, classes)
        voting_report = compute_report(
            voted_preds,
            voted_truths,
            classes,
            extra={"experiment": config.experiment, "grouping": "patient+location", "voting": True},
        )

    predictions_path = workdir / f"predictions-{config.experiment}.jsonl"
    with predictions_path.open("w") as fh:
        for entry, probs, pred in zip(test_entries, test_probs, test_preds):
            fh.write(
                json.dumps(
                    {
                        "segment_id": entry.segment_id,
                        "probs": [float(p) for p in probs],
                        "label": pred.value,
                        "group_key": f"{entry.patient_id}|{entry.location}",
                    },
                    sort_keys=True,
                )
                + "\n"
            )

    checkpoint_path = workdir / f"model-{config.experiment}.ckpt"
    save_checkpoint(
        checkpoint_path,
        model,
        adam,
        extra={
            "classes": [c.value for c in classes],
            "feature": config.feature,
            "feature_params": asdict(config.make_feature_params()),
            "log_scatter": config.log_scatter,
            "config": asdict(config),
            "best_epoch": best_epoch,
        },
    )

    report_path = workdir / f"report-{config.experiment}.json"
    report_path.write_text(report.to_json() + "\n")
    cm = ConfusionMatrix(classes, np.asarray(report.confusion_counts))
    (workdir / f"confusion-{config.experiment}.csv").write_text(cm.to_csv())
    if voting_report is not None:
        (workdir / f"report-{config.experiment}-voting.json").write_text(voting_report.to_json() + "\n")

    return ExperimentResult(
        report=report,
        voting_report=voting_report,
        checkpoint_path=str(checkpoint_path),
        predictions_path=str(predictions_path),
        report_path=str(report_path),
        best_epoch=best_epoch,
        wall_seconds=time.time() - t0,
    )


@dataclass
class AblationRow:
    window_seconds: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    is_best: bool = False


def ablate_window(config: ExperimentConfig, sizes=(1, 3, 4, 5)) -> list[AblationRow]:
    """Re-run the experiment once per segment size (never overlapping) and
    tabulate accuracy/precision/recall/F1, marking the best row by F1."""
    rows = []
    for size in sizes:
        sub = replace(
            config,
            window_seconds=size,
            workdir=str(Path(config.workdir) / f"window-{size}s"),
        )
        result = run_experiment(sub)
        macro = result.report.precision_recall_f1["macro"]
        rows.append(
            AblationRow(
                window_seconds=size,
                accuracy=result.report.accuracy,
                precision=macro["precision"],
                recall=macro["recall"],
                f1=macro["f1"],
            )
        )
    best = max(range(len(rows)), key=lambda i: rows[i].f1)
    rows[best].is_best = True
    out = Path(config.workdir) / "ablation.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps([asdict(r) for r in rows], indent=2, sort_keys=True) + "\n")
    return rows
