"""Class balancing: inverse-frequency weights, with-replacement sampling,
and majority-class downsampling."""
from __future__ import annotations

import numpy as np

from pcgkit.pipeline.manifest import DatasetManifest
from pcgkit.types import ClassLabel


def class_weights(manifest: DatasetManifest, split: str) -> dict[ClassLabel, float]:
    """W(class) = 1 / n(class) over the effective labels of one split."""
    entries = manifest.split_entries(split)
    if not entries:
        raise ValueError(f"split {split!r} is empty")
    counts = manifest.class_counts(split)
    weights = {}
    for c in manifest.classes_in_use():
        n = counts.get(c.value, 0)
        if n == 0:
            raise ValueError(f"class {c.value} has zero samples in split {split!r}")
        weights[c] = 1.0 / n
    return weights


class WeightedSampler:
    """With-replacement index sampler, probability proportional to weight.

    Draw streams are deterministic per seed; one epoch is by convention as
    long as the instance list itself.
    """

    def __init__(self, instance_weights, seed: int) -> None:
        w = np.asarray(instance_weights, dtype=np.float64)
        if w.size == 0:
            raise ValueError("no instances to sample")
        if np.any(w <= 0):
            raise ValueError("instance weights must be positive")
        self.p = w / w.sum()
        self.rng = np.random.default_rng(np.random.SeedSequence([seed, 0x3A3]))

    def draw(self, n_draws: int | None = None) -> np.ndarray:
        n = self.p.size if n_draws is None else n_draws
        return self.rng.choice(self.p.size, size=n, replace=True, p=self.p)


def weighted_sampler(manifest: DatasetManifest, split: str, seed: int) -> WeightedSampler:
    """Sampler over one split's entries with per-class inverse-frequency
    weights, so expected class frequencies come out uniform."""
    weights = class_weights(manifest, split)
    per_instance = [weights[ClassLabel(e.effective_label)] for e in manifest.split_entries(split)]
    return WeightedSampler(per_instance, seed)


def downsample_majority(
    manifest: DatasetManifest, targets: dict[ClassLabel, int], seed: int
) -> DatasetManifest:
    """Randomly keep ``targets[label]`` segments of each given class (without
    replacement); classes not named stay untouched."""
    counts = manifest.class_counts()
    for label, target in targets.items():
        have = counts.get(label.value, 0)
        if target > have:
            raise ValueError(f"cannot keep {target} of class {label.value}: only {have} available")

    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xD05]))
    drop: set[str] = set()
    for label, target in targets.items():
        ids = [e.segment_id for e in manifest.ok_entries() if e.effective_label == label.value]
        keep = set(rng.choice(len(ids), size=target, replace=False)) if target < len(ids) else set(range(len(ids)))
        drop.update(seg_id for i, seg_id in enumerate(ids) if i not in keep)

    kept_entries = [e for e in manifest.entries if e.segment_id not in drop]
    return DatasetManifest(
        manifest.dataset, manifest.window_seconds, manifest.store_root, kept_entries, dict(manifest.stats)
    )
