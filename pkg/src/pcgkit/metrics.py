"""Evaluation metrics: confusion matrix, accuracy, weighted accuracy,
precision/recall/F1, AUROC, and majority voting.

Conventions: confusion rows are the expert (true) labels, columns the
classifier (predicted) labels, ordered by the task's class tuple; macro
averages are unweighted means over classes; 0/0 ratios are defined as 0.
"""
from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from pcgkit.types import ClassLabel

MURMUR_WEIGHTS = (5.0, 3.0, 1.0)  # Present, Unknown, Absent


@dataclass
class ConfusionMatrix:
    classes: tuple[ClassLabel, ...]
    counts: np.ndarray  # rows: expert, columns: classifier

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=np.float64)
        if self.counts.shape != (len(self.classes), len(self.classes)):
            raise ValueError("counts must be square and match the class list")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def col_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        names = [c.value for c in self.classes]
        writer.writerow(["expert\\classifier"] + names)
        for name, row in zip(names, self.counts):
            writer.writerow([name] + [f"{v:g}" for v in row])
        return buf.getvalue()


def confusion(
    preds: Sequence[ClassLabel], truths: Sequence[ClassLabel], classes: Sequence[ClassLabel]
) -> ConfusionMatrix:
    """Tally (expert row, classifier column) counts over paired label lists."""
    if len(preds) != len(truths):
        raise ValueError(f"got {len(preds)} predictions for {len(truths)} truths")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)))
    for p, t in zip(preds, truths):
        if p not in index or t not in index:
            raise ValueError(f"label outside class set: pred={p}, truth={t}")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(tuple(classes), counts)


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    return float(np.trace(cm.counts) / cm.total)


def weighted_accuracy(
    cm: ConfusionMatrix,
    weights: Sequence[float] = MURMUR_WEIGHTS,
    grouping: str = "expert",
) -> float:
    """Class-weighted accuracy for the 3-class murmur task.

    ``grouping`` selects the denominator: "expert" weights the true-label row
    totals (the challenge-metric reading, default); "classifier" weights the
    predicted-label column totals as the alternative printed grouping.
    """
    if len(cm.classes) != 3:
        raise ValueError("weighted accuracy is defined for the 3-class task")
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    w = np.asarray(weights, dtype=np.float64)
    numerator = float(np.sum(w * np.diag(cm.counts)))
    if grouping == "expert":
        denominator = float(np.sum(w * cm.row_totals()))
    elif grouping == "classifier":
        denominator = float(np.sum(w * cm.col_totals()))
    else:
        raise ValueError(f"unknown grouping {grouping!r}")
    return numerator / denominator


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def precision_recall_f1(cm: ConfusionMatrix) -> dict:
    """One-vs-rest precision/recall/F1 per class plus unweighted macro means."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    per_class = {}
    for i, c in enumerate(cm.classes):
        tp = cm.counts[i, i]
        precision = _safe_div(tp, cm.col_totals()[i])
        recall = _safe_div(tp, cm.row_totals()[i])
        f1 = _safe_div(2.0 * precision * recall, precision + recall)
        per_class[c.value] = {"precision": precision, "recall": recall, "f1": f1}
    macro = {
        key: float(np.mean([stats[key] for stats in per_class.values()]))
        for key in ("precision", "recall", "f1")
    }
    return {"per_class": per_class, "macro": macro}


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks starting at 1; tied values share the average of their ranks."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(values.size, dtype=np.float64)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auroc(
    scores: np.ndarray, truths: Sequence[ClassLabel], classes: Sequence[ClassLabel]
) -> dict:
    """One-vs-rest AUROC per class (rank statistic, ties count 0.5) and the
    macro average over the classes present in the truths."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[1] != len(classes):
        raise ValueError("scores must be (n_samples, n_classes)")
    truths = list(truths)
    per_class: dict[str, float] = {}
    for j, c in enumerate(classes):
        positives = np.array([t == c for t in truths])
        n_pos = int(positives.sum())
        n_neg = positives.size - n_pos
        if n_pos == 0 or n_neg == 0:
            warnings.warn(f"AUROC: class {c.value} missing from truths, skipped")
            continue
        ranks = _average_ranks(scores[:, j])
        auc = (ranks[positives].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
        per_class[c.value] = float(auc)
    macro = float(np.mean(list(per_class.values()))) if per_class else float("nan")
    return {"per_class": per_class, "macro": macro}


def vote(labels: Sequence[ClassLabel], precedence: Sequence[ClassLabel]) -> ClassLabel:
    """Modal label of one patient+location group; ties resolve to the most
    severe label, i.e. the earliest entry of ``precedence``."""
    labels = list(labels)
    if not labels:
        raise ValueError("cannot vote on an empty group")
    tally = {c: 0 for c in precedence}
    for label in labels:
        if label not in tally:
            raise ValueError(f"label {label} missing from precedence order")
        tally[label] += 1
    best = max(tally.items(), key=lambda item: (item[1], -list(precedence).index(item[0])))
    return best[0]


@dataclass
class MetricReport:
    classes: list[str]
    n_samples: int
    accuracy: float
    weighted_accuracy: float | None
    precision_recall_f1: dict
    auroc: dict | None
    confusion_counts: list[list[float]]
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "classes": self.classes,
            "n_samples": self.n_samples,
            "accuracy": self.accuracy,
            "weighted_accuracy": self.weighted_accuracy,
            "precision_recall_f1": self.precision_recall_f1,
            "auroc": self.auroc,
            "confusion_counts": self.confusion_counts,
            "extra": self.extra,
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "MetricReport":
        data = json.loads(text)
        return cls(
            classes=data["classes"],
            n_samples=data["n_samples"],
            accuracy=data["accuracy"],
            weighted_accuracy=data["weighted_accuracy"],
            precision_recall_f1=data["precision_recall_f1"],
            auroc=data["auroc"],
            confusion_counts=data["confusion_counts"],
            extra=data.get("extra", {}),
        )


def compute_report(
    preds: Sequence[ClassLabel],
    truths: Sequence[ClassLabel],
    classes: Sequence[ClassLabel],
    scores: np.ndarray | None = None,
    extra: dict | None = None,
) -> MetricReport:
    """Assemble the full metric suite for one evaluation pass."""
    cm = confusion(preds, truths, classes)
    return MetricReport(
        classes=[c.value for c in classes],
        n_samples=int(cm.total),
        accuracy=accuracy(cm),
        weighted_accuracy=weighted_accuracy(cm) if len(classes) == 3 else None,
        precision_recall_f1=precision_recall_f1(cm),
        auroc=auroc(scores, truths, classes) if scores is not None else None,
        confusion_counts=cm.counts.tolist(),
        extra=extra or {},
    )
