"""On-disk segment store: one raw float32 file per segment + a JSONL index."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from pcgkit.types import ClassLabel, Location, Segment

INDEX_NAME = "segments_index.jsonl"
SEGMENT_DIR = "segments"

STATUS_OK = "ok"
STATUS_REJECTED = "rejected_zero_variance"


@dataclass
class StoredSegment:
    segment_id: str
    recording_id: str
    patient_id: str
    location: str
    label: str
    window_seconds: int
    sample_rate_hz: int
    n_samples: int
    status: str
    path: str

    def to_segment(self, samples: np.ndarray) -> Segment:
        return Segment(
            recording_id=self.recording_id,
            patient_id=self.patient_id,
            location=Location(self.location),
            index=int(self.segment_id.rsplit("_s", 1)[1]),
            samples=samples,
            label=ClassLabel(self.label),
            window_seconds=self.window_seconds,
            sample_rate_hz=self.sample_rate_hz,
        )


class SegmentStore:
    """Persists segments under ``root/segments/<id>.f32`` with a JSONL index.

    Accepted segments hold normalized samples; rejected ones keep their raw
    payload so the review tool can still play them.
    """

    def __init__(self, root) -> None:
        self.root = Path(root)
        self.seg_dir = self.root / SEGMENT_DIR
        self.index_path = self.root / INDEX_NAME
        self._index: dict[str, StoredSegment] = {}
        if self.index_path.exists():
            self._load_index()

    def _load_index(self) -> None:
        self._index.clear()
        with self.index_path.open() as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rec = StoredSegment(**json.loads(line))
                    self._index[rec.segment_id] = rec

    def add(self, seg: Segment, status: str = STATUS_OK) -> StoredSegment:
        self.seg_dir.mkdir(parents=True, exist_ok=True)
        rel = f"{SEGMENT_DIR}/{seg.segment_id}.f32"
        (self.root / rel).write_bytes(seg.samples.astype("<f4").tobytes())
        entry = StoredSegment(
            segment_id=seg.segment_id,
            recording_id=seg.recording_id,
            patient_id=seg.patient_id,
            location=seg.location.value,
            label=seg.label.value,
            window_seconds=seg.window_seconds,
            sample_rate_hz=seg.sample_rate_hz,
            n_samples=int(seg.samples.size),
            status=status,
            path=rel,
        )
        self._index[entry.segment_id] = entry
        return entry

    def flush_index(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = self.index_path.with_suffix(".jsonl.tmp")
        with tmp.open("w") as fh:
            for entry in self.entries():
                fh.write(json.dumps(asdict(entry)) + "\n")
        tmp.replace(self.index_path)

    def entries(self) -> list[StoredSegment]:
        return sorted(self._index.values(), key=lambda e: (e.recording_id, e.segment_id))

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, segment_id: str) -> bool:
        return segment_id in self._index

    def get(self, segment_id: str) -> StoredSegment:
        return self._index[segment_id]

    def load_samples(self, segment_id: str) -> np.ndarray:
        entry = self._index[segment_id]
        raw = (self.root / entry.path).read_bytes()
        return np.frombuffer(raw, dtype="<f4").astype(np.float64)

    def load_segment(self, segment_id: str) -> Segment:
        entry = self._index[segment_id]
        return entry.to_segment(self.load_samples(segment_id))
