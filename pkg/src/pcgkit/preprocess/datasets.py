"""Loaders for the two supported PhysioNet directory layouts.

2022 layout: one ``<patient>.txt`` metadata file per patient next to
``<patient>_<LOC>[...].wav`` recordings. The header line is
``<patient> <n_recordings> <fs>``; recording lines name location and files;
``#Murmur:`` and ``#Murmur locations:`` carry the labels.

2016 layout: a ``REFERENCE.csv`` of ``<record>,<label>`` rows (-1 normal,
1 abnormal) next to ``<record>.wav`` files recorded at a single chest spot.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from pcgkit import wavio
from pcgkit.types import ClassLabel, Location, PcgRecording


class DatasetLayoutError(ValueError):
    pass


@dataclass(frozen=True)
class RecordingMeta:
    """Label/location row for one recording, resolved from dataset metadata."""

    recording_id: str
    patient_id: str
    location: Location
    label: ClassLabel
    expected_rate_hz: int | None = None


def load_recording(path, meta: RecordingMeta) -> PcgRecording:
    """Load one WAV file under the labels its metadata row supplies.

    The sample rate comes from the file header; when the metadata states a
    rate, a mismatch is an error rather than silently trusted.
    """
    try:
        samples, rate = wavio.read_wav(path)
    except (OSError, ValueError) as exc:
        raise DatasetLayoutError(f"cannot read {path}: {exc}") from exc
    if meta.expected_rate_hz is not None and rate != meta.expected_rate_hz:
        raise DatasetLayoutError(
            f"{path}: header rate {rate} Hz contradicts metadata {meta.expected_rate_hz} Hz"
        )
    return PcgRecording(
        recording_id=meta.recording_id,
        patient_id=meta.patient_id,
        location=meta.location,
        samples=samples,
        sample_rate_hz=rate,
        label=meta.label,
    )


def _parse_patient_file(path: Path) -> tuple[str, int, list[tuple[Location, str]], dict[str, str]]:
    lines = path.read_text().splitlines()
    if not lines:
        raise DatasetLayoutError(f"{path}: empty patient file")
    head = lines[0].split()
    if len(head) < 3:
        raise DatasetLayoutError(f"{path}: malformed header line {lines[0]!r}")
    patient_id, n_recordings, fs = head[0], int(head[1]), int(head[2])
    recordings: list[tuple[Location, str]] = []
    annotations: dict[str, str] = {}
    for line in lines[1:]:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            annotations[key.strip()] = value.strip()
        elif len(recordings) < n_recordings:
            parts = line.split()
            loc = Location(parts[0])
            wav_name = next((p for p in parts if p.endswith(".wav")), None)
            if wav_name is None:
                raise DatasetLayoutError(f"{path}: recording line without wav file: {line!r}")
            recordings.append((loc, wav_name))
    return patient_id, fs, recordings, annotations


def iter_recordings_2022(root) -> Iterator[tuple[Path, RecordingMeta]]:
    """Yield (wav path, metadata) for every recording in a 2022-layout tree.

    Per-recording labels follow the patient label: Unknown patients propagate
    Unknown; for murmur-present patients only the locations listed under
    ``#Murmur locations:`` are Present, the rest Absent.
    """
    root = Path(root)
    patient_files = sorted(root.rglob("*.txt"))
    if not patient_files:
        raise DatasetLayoutError(f"{root}: no patient metadata files found")
    for pf in patient_files:
        patient_id, fs, recordings, annotations = _parse_patient_file(pf)
        murmur = annotations.get("Murmur")
        if murmur is None:
            raise DatasetLayoutError(f"{pf}: missing '#Murmur:' label row")
        try:
            patient_label = ClassLabel(murmur)
        except ValueError as exc:
            raise DatasetLayoutError(f"{pf}: unknown murmur label {murmur!r}") from exc
        murmur_locations = {
            tok for tok in annotations.get("Murmur locations", "").split("+") if tok
        }
        for loc, wav_name in recordings:
            if patient_label is ClassLabel.UNKNOWN:
                label = ClassLabel.UNKNOWN
            elif patient_label is ClassLabel.PRESENT:
                label = ClassLabel.PRESENT if loc.value in murmur_locations else ClassLabel.ABSENT
            else:
                label = ClassLabel.ABSENT
            wav_path = pf.parent / wav_name
            yield wav_path, RecordingMeta(
                recording_id=Path(wav_name).stem,
                patient_id=patient_id,
                location=loc,
                label=label,
                expected_rate_hz=fs,
            )


_REFERENCE_LABELS = {"-1": ClassLabel.NORMAL, "1": ClassLabel.ABNORMAL}


def iter_recordings_2016(root) -> Iterator[tuple[Path, RecordingMeta]]:
    """Yield (wav path, metadata) for every row of a 2016-layout REFERENCE.csv."""
    root = Path(root)
    candidates = sorted(root.rglob("REFERENCE*.csv"))
    if not candidates:
        raise DatasetLayoutError(f"{root}: no REFERENCE.csv found")
    for ref in candidates:
        for line_no, line in enumerate(ref.read_text().splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            record, _, raw_label = line.partition(",")
            label = _REFERENCE_LABELS.get(raw_label.strip())
            if label is None:
                raise DatasetLayoutError(f"{ref}:{line_no}: unknown label {raw_label!r}")
            yield ref.parent / f"{record}.wav", RecordingMeta(
                recording_id=record,
                patient_id=record,  # one recording per subject in this set
                location=Location.SINGLE,
                label=label,
            )
