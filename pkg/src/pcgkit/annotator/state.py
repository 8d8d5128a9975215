"""Review-session state: items, the one-way relabel rule, and the audit log.

Persistence is a JSONL manifest plus an append-only audit log; the manifest
is rewritten atomically (temp file + rename) after every decision, and the
audit log is never rewritten. Mutations are serialized by a single lock;
reads work on immutable snapshots of the item map.
"""
from __future__ import annotations

import json
import threading
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from pcgkit.pipeline.manifest import RelabelRuleError, check_transition
from pcgkit.preprocess.store import SegmentStore
from pcgkit.types import ClassLabel

STATUS_UNREVIEWED = "unreviewed"
STATUS_CONFIRMED = "confirmed"
STATUS_RELABELED = "relabeled"

MANIFEST_NAME = "review_manifest.jsonl"
AUDIT_NAME = "relabel_audit.jsonl"


@dataclass(frozen=True)
class ReviewItem:
    segment_id: str
    recording_id: str
    location: str
    original_label: str
    effective_label: str
    status: str = STATUS_UNREVIEWED
    note: str = ""


def _apply_audit_row(items: dict[str, ReviewItem], row: dict) -> dict[str, ReviewItem]:
    item = items[row["segment_id"]]
    if row["action"] == "relabel":
        check_transition(ClassLabel(row["from"]), ClassLabel(row["to"]))
        item = replace(item, effective_label=row["to"], status=STATUS_RELABELED)
    elif row["action"] == "confirm":
        item = replace(item, status=STATUS_CONFIRMED)
    else:
        raise ValueError(f"unknown audit action {row['action']!r}")
    return {**items, item.segment_id: item}


class ReviewState:
    def __init__(self, workdir) -> None:
        self.workdir = Path(workdir)
        self.manifest_path = self.workdir / MANIFEST_NAME
        self.audit_path = self.workdir / AUDIT_NAME
        self._lock = threading.Lock()
        if self.manifest_path.exists():
            self._items = self._load_manifest()
        else:
            self._items = self._bootstrap_from_store()
            self._persist(self._items)

    def _bootstrap_from_store(self) -> dict[str, ReviewItem]:
        store = SegmentStore(self.workdir)
        items = {}
        for entry in store.entries():
            items[entry.segment_id] = ReviewItem(
                segment_id=entry.segment_id,
                recording_id=entry.recording_id,
                location=entry.location,
                original_label=entry.label,
                effective_label=entry.label,
            )
        return items

    def _load_manifest(self) -> dict[str, ReviewItem]:
        items = {}
        for line in self.manifest_path.read_text().splitlines():
            if line.strip():
                item = ReviewItem(**json.loads(line))
                items[item.segment_id] = item
        return items

    def _persist(self, items: dict[str, ReviewItem]) -> None:
        self.workdir.mkdir(parents=True, exist_ok=True)
        tmp = self.manifest_path.with_suffix(".tmp")
        with tmp.open("w") as fh:
            for item in sorted(items.values(), key=lambda i: (i.recording_id, i.segment_id)):
                fh.write(json.dumps(asdict(item), sort_keys=True) + "\n")
        tmp.replace(self.manifest_path)

    def _append_audit(self, row: dict) -> None:
        with self.audit_path.open("a") as fh:
            fh.write(json.dumps(row, sort_keys=True) + "\n")

    # -- reads ------------------------------------------------------------

    def items_snapshot(self) -> dict[str, ReviewItem]:
        return self._items

    def list_items(self, status: str | None = None, page: int = 0, page_size: int = 50):
        """Stable (recording id, segment id) ordering; returns (items, total)."""
        if page < 0 or page_size < 1:
            raise ValueError("page must be >= 0 and page_size >= 1")
        items = sorted(self._items.values(), key=lambda i: (i.recording_id, i.segment_id))
        if status is not None:
            if status not in (STATUS_UNREVIEWED, STATUS_CONFIRMED, STATUS_RELABELED):
                raise ValueError(f"unknown review status {status!r}")
            items = [i for i in items if i.status == status]
        total = len(items)
        start = page * page_size
        return items[start : start + page_size], total

    def get(self, segment_id: str) -> ReviewItem:
        return self._items[segment_id]

    def class_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for item in self._items.values():
            counts[item.effective_label] = counts.get(item.effective_label, 0) + 1
        return counts

    # -- mutations ---------------------------------------------------------

    def decide(self, segment_id: str, to: str) -> ReviewItem:
        """Apply one review decision: ``to`` is "confirm" or a target label.

        Raises KeyError for unknown segments and RelabelRuleError for any
        transition outside Present->Unknown / Absent->Unknown.
        """
        with self._lock:
            item = self._items[segment_id]
            if to == "confirm":
                if item.status == STATUS_RELABELED:
                    raise RelabelRuleError(
                        f"segment {segment_id} was already re-labeled to Unknown; "
                        "confirming the original label would hide that change"
                    )
                updated = replace(item, status=STATUS_CONFIRMED)
                audit = {
                    "ts": time.time(),
                    "segment_id": segment_id,
                    "from": item.effective_label,
                    "to": item.effective_label,
                    "action": "confirm",
                }
            else:
                target = ClassLabel(to)
                check_transition(ClassLabel(item.original_label), target)
                updated = replace(item, effective_label=target.value, status=STATUS_RELABELED)
                audit = {
                    "ts": time.time(),
                    "segment_id": segment_id,
                    "from": item.original_label,
                    "to": target.value,
                    "action": "relabel",
                }
            self._items = {**self._items, segment_id: updated}
            self._append_audit(audit)
            self._persist(self._items)
            return updated

    # -- export / replay ----------------------------------------------------

    def export_relabels(self) -> list[dict]:
        """Rows consumable by the training manifest builder."""
        return [
            {"segment_id": i.segment_id, "from": i.original_label, "to": i.effective_label}
            for i in sorted(self._items.values(), key=lambda i: (i.recording_id, i.segment_id))
            if i.status == STATUS_RELABELED
        ]

    def audit_rows(self) -> list[dict]:
        if not self.audit_path.exists():
            return []
        return [json.loads(line) for line in self.audit_path.read_text().splitlines() if line.strip()]

    def replay_audit(self) -> dict[str, ReviewItem]:
        """Rebuild the item map from pristine originals plus the audit log."""
        items = {
            seg_id: ReviewItem(
                segment_id=item.segment_id,
                recording_id=item.recording_id,
                location=item.location,
                original_label=item.original_label,
                effective_label=item.original_label,
            )
            for seg_id, item in self._items.items()
        }
        for row in self.audit_rows():
            items = _apply_audit_row(items, row)
        return items
