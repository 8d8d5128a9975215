"""Segmentation and normalization of PCG recordings.

The whole recording is low-pass filtered first, then cut into non-overlapping
N-second windows starting at sample 0 (the trailing remainder is dropped),
and each window is z-score normalized independently.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from pcgkit.filters import DEFAULT_CUTOFF_HZ, DEFAULT_ORDER, butterworth_lowpass
from pcgkit.types import PcgRecording, Segment

SIGMA_FLOOR = 1e-12


class ZeroVarianceError(ValueError):
    """Raised for near-constant segments, which carry no usable signal."""


@dataclass
class PreprocessStats:
    """Counters accumulated while preprocessing a batch of recordings."""

    recordings: int = 0
    segments: int = 0
    too_short: int = 0
    rejected_zero_variance: int = 0
    nonstandard_rate: int = 0

    def merge(self, other: "PreprocessStats") -> None:
        for name in ("recordings", "segments", "too_short", "rejected_zero_variance", "nonstandard_rate"):
            setattr(self, name, getattr(self, name) + getattr(other, name))


def segment_recording(
    rec: PcgRecording, window_seconds: int, stats: PreprocessStats | None = None
) -> list[Segment]:
    """Cut a recording into floor(duration / N) contiguous N-second segments.

    A recording shorter than one window yields an empty list and bumps the
    ``too_short`` counter.
    """
    if window_seconds < 1:
        raise ValueError("window_seconds must be >= 1")
    step = window_seconds * rec.sample_rate_hz
    n_segments = rec.samples.size // step
    if n_segments == 0 and stats is not None:
        stats.too_short += 1
    return [
        Segment(
            recording_id=rec.recording_id,
            patient_id=rec.patient_id,
            location=rec.location,
            index=i,
            samples=rec.samples[i * step : (i + 1) * step].copy(),
            label=rec.label,
            window_seconds=window_seconds,
            sample_rate_hz=rec.sample_rate_hz,
        )
        for i in range(n_segments)
    ]


def zscore_normalize(seg: Segment) -> Segment:
    """Return the segment scaled to zero mean and unit population stddev.

    Raises:
        ZeroVarianceError: population sigma <= 1e-12 (near-constant payload);
            such segments go to the noise-only review queue instead.
    """
    x = seg.samples
    mu = float(x.mean())
    sigma = float(x.std())  # population (1/n) convention
    if sigma <= SIGMA_FLOOR:
        raise ZeroVarianceError(
            f"segment {seg.segment_id}: sigma={sigma:.3e} is below {SIGMA_FLOOR}"
        )
    return Segment(
        recording_id=seg.recording_id,
        patient_id=seg.patient_id,
        location=seg.location,
        index=seg.index,
        samples=(x - mu) / sigma,
        label=seg.label,
        window_seconds=seg.window_seconds,
        sample_rate_hz=seg.sample_rate_hz,
    )


def preprocess_recording(
    rec: PcgRecording,
    window_seconds: int,
    cutoff_hz: float = DEFAULT_CUTOFF_HZ,
    order: int = DEFAULT_ORDER,
    stats: PreprocessStats | None = None,
) -> tuple[list[Segment], list[Segment]]:
    """Filter, segment, and normalize one recording.

    Returns (normalized segments, rejected zero-variance segments). Filtering
    runs over the whole recording before segmentation to keep filter
    transients out of the window boundaries.
    """
    stats = stats if stats is not None else PreprocessStats()
    stats.recordings += 1
    if rec.nonstandard_rate:
        stats.nonstandard_rate += 1
    filtered = PcgRecording(
        recording_id=rec.recording_id,
        patient_id=rec.patient_id,
        location=rec.location,
        samples=butterworth_lowpass(rec.samples, rec.sample_rate_hz, order, cutoff_hz),
        sample_rate_hz=rec.sample_rate_hz,
        label=rec.label,
    )
    accepted: list[Segment] = []
    rejected: list[Segment] = []
    for seg in segment_recording(filtered, window_seconds, stats):
        try:
            accepted.append(zscore_normalize(seg))
        except ZeroVarianceError:
            stats.rejected_zero_variance += 1
            rejected.append(seg)
    stats.segments += len(accepted)
    return accepted, rejected
