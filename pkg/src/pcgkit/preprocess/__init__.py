from pcgkit.preprocess.datasets import (
    RecordingMeta,
    iter_recordings_2016,
    iter_recordings_2022,
    load_recording,
)
from pcgkit.preprocess.ops import (
    PreprocessStats,
    preprocess_recording,
    segment_recording,
    zscore_normalize,
)
from pcgkit.preprocess.store import SegmentStore, StoredSegment

__all__ = [
    "RecordingMeta",
    "iter_recordings_2016",
    "iter_recordings_2022",
    "load_recording",
    "PreprocessStats",
    "preprocess_recording",
    "segment_recording",
    "zscore_normalize",
    "SegmentStore",
    "StoredSegment",
]
