"""Domain types shared across the toolkit."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

SUPPORTED_RATES = (2000, 4000)


class Task(str, enum.Enum):
    """Which classification problem a dataset belongs to."""

    MURMUR_2022 = "PCG2022"
    ABNORMAL_2016 = "PCG2016"


class ClassLabel(str, enum.Enum):
    PRESENT = "Present"
    ABSENT = "Absent"
    UNKNOWN = "Unknown"
    NORMAL = "Normal"
    ABNORMAL = "Abnormal"


# Class order doubles as severity precedence (most severe first); it also fixes
# the row/column order of confusion matrices.
TASK_CLASSES: dict[Task, tuple[ClassLabel, ...]] = {
    Task.MURMUR_2022: (ClassLabel.PRESENT, ClassLabel.UNKNOWN, ClassLabel.ABSENT),
    Task.ABNORMAL_2016: (ClassLabel.ABNORMAL, ClassLabel.NORMAL),
}


def task_for_label(label: ClassLabel) -> Task:
    for task, classes in TASK_CLASSES.items():
        if label in classes:
            return task
    raise ValueError(f"label {label} belongs to no known task")


class Location(str, enum.Enum):
    """Auscultation location; Single marks the one-microphone 2016 recordings."""

    AV = "AV"
    PV = "PV"
    TV = "TV"
    MV = "MV"
    PHC = "Phc"
    SINGLE = "Single"


@dataclass
class PcgRecording:
    """One audio recording plus its metadata.

    ``samples`` are float64 in [-1, 1]; ``nonstandard_rate`` flags files whose
    header rate is not one of the two supported dataset rates.
    """

    recording_id: str
    patient_id: str
    location: Location
    samples: np.ndarray
    sample_rate_hz: int
    label: ClassLabel
    nonstandard_rate: bool = False

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ValueError("recording needs a non-empty 1-D sample vector")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")
        if self.sample_rate_hz not in SUPPORTED_RATES:
            self.nonstandard_rate = True
        if (task_for_label(self.label) is Task.ABNORMAL_2016) != (self.location is Location.SINGLE):
            raise ValueError("the Single location and 2016-task labels imply each other")

    @property
    def duration_seconds(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass
class Segment:
    """A fixed-length window cut from one recording."""

    recording_id: str
    patient_id: str
    location: Location
    index: int
    samples: np.ndarray
    label: ClassLabel
    window_seconds: int
    sample_rate_hz: int

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64)
        expected = self.window_seconds * self.sample_rate_hz
        if self.samples.size != expected:
            raise ValueError(
                f"segment must hold exactly {expected} samples, got {self.samples.size}"
            )
        if self.index < 0:
            raise ValueError("segment index must be >= 0")

    @property
    def segment_id(self) -> str:
        return f"{self.recording_id}_s{self.index:04d}"
