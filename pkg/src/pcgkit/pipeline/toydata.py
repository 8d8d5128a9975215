"""Synthetic three-class audio corpus in the 2022 directory layout.

The real PhysioNet audio cannot ship with the repository, so this generator
provides the desk-scale vehicle for end-to-end runs: murmur-absent patients
get quasi-periodic low tones, murmur-present patients get an AM-modulated
carrier, and unknown patients get gated noise bursts. Class assignment is
deliberately imbalanced (roughly 5:3:2) to exercise the balancing machinery.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from pcgkit import wavio
from pcgkit.types import ClassLabel, Location

_LOCATIONS = (Location.AV, Location.PV, Location.TV, Location.MV)


def _tone(rng, n, fs):
    f0 = rng.uniform(80.0, 220.0)
    t = np.arange(n) / fs
    sig = np.sin(2 * np.pi * f0 * t) + 0.3 * np.sin(2 * np.pi * 2 * f0 * t + rng.uniform(0, np.pi))
    return sig


def _am_carrier(rng, n, fs):
    carrier = rng.uniform(260.0, 440.0)
    mod = rng.uniform(6.0, 12.0)
    t = np.arange(n) / fs
    return (1.0 + 0.9 * np.sin(2 * np.pi * mod * t)) * np.sin(2 * np.pi * carrier * t)


def _noise_bursts(rng, n, fs):
    gate_hz = rng.uniform(2.0, 5.0)
    t = np.arange(n) / fs
    gate = (np.sin(2 * np.pi * gate_hz * t + rng.uniform(0, np.pi)) > 0).astype(float)
    return rng.standard_normal(n) * (0.2 + 0.8 * gate)


_SYNTHS = {
    ClassLabel.ABSENT: _tone,
    ClassLabel.PRESENT: _am_carrier,
    ClassLabel.UNKNOWN: _noise_bursts,
}

# ~5:3:2 class mix over a repeating ten-patient cycle
_CLASS_CYCLE = (
    ClassLabel.ABSENT,
    ClassLabel.PRESENT,
    ClassLabel.ABSENT,
    ClassLabel.UNKNOWN,
    ClassLabel.PRESENT,
    ClassLabel.ABSENT,
    ClassLabel.UNKNOWN,
    ClassLabel.ABSENT,
    ClassLabel.PRESENT,
    ClassLabel.ABSENT,
)


def generate_toy_dataset(
    out_dir,
    n_patients: int = 100,
    seconds: float = 6.0,
    fs: int = 4000,
    seed: int = 0,
    noise_level: float = 0.02,
) -> Path:
    """Write the synthetic corpus; returns the dataset root.

    Default sizing (100 patients x 6 s) yields 600 one-second segments.
    """
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x702]))
    n = int(seconds * fs)
    for i in range(n_patients):
        patient_id = f"t{i + 1:04d}"
        label = _CLASS_CYCLE[i % len(_CLASS_CYCLE)]
        location = _LOCATIONS[i % len(_LOCATIONS)]
        sig = _SYNTHS[label](rng, n, fs) + noise_level * rng.standard_normal(n)
        sig = 0.8 * sig / np.max(np.abs(sig))
        name = f"{patient_id}_{location.value}"
        wavio.write_wav(root / f"{name}.wav", sig, fs, "int16")
        lines = [
            f"{patient_id} 1 {fs}",
            f"{location.value} {name}.hea {name}.wav {name}.tsv",
            "#Age: Child",
            f"#Murmur: {label.value}",
        ]
        if label is ClassLabel.PRESENT:
            lines.append(f"#Murmur locations: {location.value}")
        (root / f"{patient_id}.txt").write_text("\n".join(lines) + "\n")
    return root
