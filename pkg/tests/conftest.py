import numpy as np
import pytest

from pcgkit import wavio
from pcgkit.types import ClassLabel


def _tone(fs, seconds, freq, amp=0.5, phase=0.0):
    t = np.arange(int(fs * seconds)) / fs
    return amp * np.sin(2 * np.pi * freq * t + phase)


def write_patient_2022(root, patient_id, fs, recordings, murmur, murmur_locations=()):
    """Write one 2022-layout patient: metadata txt plus the wav files.

    recordings: list of (location string, samples array).
    """
    lines = [f"{patient_id} {len(recordings)} {fs}"]
    for loc, samples in recordings:
        suffix = "" if sum(1 for l, _ in recordings if l == loc) == 1 else f"_{recordings.index((loc, samples)) + 1}"
        name = f"{patient_id}_{loc}{suffix}"
        lines.append(f"{loc} {name}.hea {name}.wav {name}.tsv")
        wavio.write_wav(root / f"{name}.wav", samples, fs, "int16")
    lines.append("#Age: Child")
    lines.append(f"#Murmur: {murmur}")
    if murmur_locations:
        lines.append("#Murmur locations: " + "+".join(murmur_locations))
    (root / f"{patient_id}.txt").write_text("\n".join(lines) + "\n")


@pytest.fixture
def dataset_2022(tmp_path):
    """Small synthetic 2022-style dataset: 3 patients, distinct labels."""
    root = tmp_path / "pcg2022"
    root.mkdir()
    fs = 4000
    rng = np.random.default_rng(7)
    noisy = lambda sig: sig + 0.01 * rng.standard_normal(sig.size)
    write_patient_2022(
        root,
        "90001",
        fs,
        [("AV", noisy(_tone(fs, 10, 110))), ("PV", noisy(_tone(fs, 9, 130)))],
        "Present",
        murmur_locations=("AV",),
    )
    write_patient_2022(root, "90002", fs, [("MV", noisy(_tone(fs, 12, 90)))], "Absent")
    write_patient_2022(root, "90003", fs, [("TV", noisy(_tone(fs, 8, 70)))], "Unknown")
    return root


@pytest.fixture
def dataset_2016(tmp_path):
    """Small synthetic 2016-style dataset: 4 single-location records."""
    root = tmp_path / "pcg2016"
    root.mkdir()
    fs = 2000
    rng = np.random.default_rng(11)
    rows = []
    for i, label in enumerate(["-1", "1", "-1", "1"]):
        name = f"a{i + 1:04d}"
        sig = _tone(fs, 8, 80 + 20 * i) + 0.01 * rng.standard_normal(8 * fs)
        wavio.write_wav(root / f"{name}.wav", sig, fs, "int16")
        rows.append(f"{name},{label}")
    (root / "REFERENCE.csv").write_text("\n".join(rows) + "\n")
    return root


@pytest.fixture
def present_label():
    return ClassLabel.PRESENT
