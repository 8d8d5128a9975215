"""Dataset manifest: segment inventory, re-label application, patient splits."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from pcgkit.preprocess import (
    PreprocessStats,
    SegmentStore,
    iter_recordings_2016,
    iter_recordings_2022,
    load_recording,
    preprocess_recording,
)
from pcgkit.preprocess.store import STATUS_OK, STATUS_REJECTED
from pcgkit.types import TASK_CLASSES, ClassLabel, Task

SPLITS = ("train", "val", "test")


class RelabelRuleError(ValueError):
    """A relabel entry tries a transition the curation rule forbids."""


def check_transition(original: ClassLabel, new: ClassLabel) -> None:
    """Only murmur-present or murmur-absent segments may become Unknown."""
    if new is not ClassLabel.UNKNOWN or original not in (ClassLabel.PRESENT, ClassLabel.ABSENT):
        raise RelabelRuleError(
            f"illegal transition {original.value} -> {new.value}: only Present->Unknown "
            "and Absent->Unknown are allowed"
        )


@dataclass
class ManifestEntry:
    segment_id: str
    recording_id: str
    patient_id: str
    location: str
    label: str
    effective_label: str
    split: str
    window_seconds: int
    sample_rate_hz: int
    n_samples: int
    status: str


@dataclass
class DatasetManifest:
    dataset: str  # Task value: PCG2022 or PCG2016
    window_seconds: int
    store_root: str
    entries: list[ManifestEntry] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def task(self) -> Task:
        return Task(self.dataset)

    def ok_entries(self) -> list[ManifestEntry]:
        return [e for e in self.entries if e.status == STATUS_OK]

    def split_entries(self, split: str) -> list[ManifestEntry]:
        return [e for e in self.ok_entries() if e.split == split]

    def classes_in_use(self) -> tuple[ClassLabel, ...]:
        present = {e.effective_label for e in self.ok_entries()}
        return tuple(c for c in TASK_CLASSES[self.task] if c.value in present)

    def class_counts(self, split: str | None = None) -> dict[str, int]:
        entries = self.ok_entries() if split is None else self.split_entries(split)
        counts: dict[str, int] = {}
        for e in entries:
            counts[e.effective_label] = counts.get(e.effective_label, 0) + 1
        return counts

    def filtered(self, drop_labels: set[ClassLabel]) -> "DatasetManifest":
        drop = {c.value for c in drop_labels}
        kept = [e for e in self.entries if e.effective_label not in drop]
        return DatasetManifest(self.dataset, self.window_seconds, self.store_root, kept, dict(self.stats))

    def save(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as fh:
            header = {
                "dataset": self.dataset,
                "window_seconds": self.window_seconds,
                "store_root": self.store_root,
                "stats": self.stats,
            }
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for entry in self.entries:
                fh.write(json.dumps(asdict(entry), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        lines = Path(path).read_text().splitlines()
        header = json.loads(lines[0])
        entries = [ManifestEntry(**json.loads(line)) for line in lines[1:] if line.strip()]
        return cls(header["dataset"], header["window_seconds"], header["store_root"], entries, header.get("stats", {}))


def load_relabel_file(path) -> list[dict]:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line:
            rows.append(json.loads(line))
    return rows


def apply_relabels(manifest: DatasetManifest, relabels: list[dict]) -> int:
    """Override effective labels; every entry must obey the transition rule.

    Returns the number of segments whose effective label changed.
    """
    by_id = {e.segment_id: e for e in manifest.entries}
    changed = 0
    for row in relabels:
        seg_id = row["segment_id"]
        entry = by_id.get(seg_id)
        if entry is None:
            raise RelabelRuleError(f"relabel for unknown segment {seg_id}")
        target = ClassLabel(row["to"])
        original = ClassLabel(entry.label)
        check_transition(original, target)
        if entry.effective_label != target.value:
            entry.effective_label = target.value
            changed += 1
    return changed


def build_manifest(
    dataset_root,
    dataset: Task,
    window_seconds: int,
    out_dir,
    relabel_file=None,
    cutoff_hz: float = 500.0,
    order: int = 5,
) -> DatasetManifest:
    """Preprocess a dataset tree into a segment store plus manifest.

    Labels are inherited from the parent recording, then overridden by the
    relabel file (validated against the one-way transition rule).
    """
    out_dir = Path(out_dir)
    store = SegmentStore(out_dir)
    stats = PreprocessStats()
    walker = iter_recordings_2022 if dataset is Task.MURMUR_2022 else iter_recordings_2016
    manifest = DatasetManifest(dataset.value, window_seconds, str(out_dir))

    for wav_path, meta in walker(dataset_root):
        rec = load_recording(wav_path, meta)
        accepted, rejected = preprocess_recording(rec, window_seconds, cutoff_hz, order, stats)
        for seg, status in [(s, STATUS_OK) for s in accepted] + [(s, STATUS_REJECTED) for s in rejected]:
            store.add(seg, status)
            manifest.entries.append(
                ManifestEntry(
                    segment_id=seg.segment_id,
                    recording_id=seg.recording_id,
                    patient_id=seg.patient_id,
                    location=seg.location.value,
                    label=seg.label.value,
                    effective_label=seg.label.value,
                    split="",
                    window_seconds=window_seconds,
                    sample_rate_hz=seg.sample_rate_hz,
                    n_samples=int(seg.samples.size),
                    status=status,
                )
            )
    store.flush_index()
    manifest.stats = asdict(stats)
    if relabel_file is not None:
        apply_relabels(manifest, load_relabel_file(relabel_file))
    manifest.entries.sort(key=lambda e: (e.recording_id, e.segment_id))
    return manifest


def split_patients(
    manifest: DatasetManifest,
    ratios: tuple[float, float, float] = (0.70, 0.15, 0.15),
    seed: int = 0,
) -> DatasetManifest:
    """Assign train/val/test at patient granularity, deterministically.

    Patient counts per split follow the ratios exactly (largest remainder);
    patients are then placed, largest first, into the split with the biggest
    remaining segment deficit, which keeps segment-level ratios close to the
    targets even when patients contribute uneven segment counts.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("split ratios must sum to 1")
    entries = manifest.ok_entries()
    patients: dict[str, int] = {}
    for e in entries:
        patients[e.patient_id] = patients.get(e.patient_id, 0) + 1
    if len(patients) < 3:
        raise ValueError(f"need at least 3 patients to split, got {len(patients)}")

    n = len(patients)
    quotas = [int(np.floor(r * n)) for r in ratios]
    remainders = [r * n - q for r, q in zip(ratios, quotas)]
    for _ in range(n - sum(quotas)):
        i = int(np.argmax(remainders))
        quotas[i] += 1
        remainders[i] = -1.0

    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5E6]))
    ids = sorted(patients)
    order = [ids[i] for i in rng.permutation(len(ids))]
    order.sort(key=lambda p: -patients[p])  # stable: random order within equal counts

    total_segments = sum(patients.values())
    targets = [r * total_segments for r in ratios]
    assigned = [0.0, 0.0, 0.0]
    remaining = list(quotas)
    choice: dict[str, str] = {}
    for patient in order:
        deficits = [
            (targets[i] - assigned[i]) if remaining[i] > 0 else -np.inf for i in range(3)
        ]
        best = int(np.argmax(deficits))
        choice[patient] = SPLITS[best]
        assigned[best] += patients[patient]
        remaining[best] -= 1

    for e in manifest.entries:
        e.split = choice.get(e.patient_id, "") if e.status == STATUS_OK else ""
    return manifest
