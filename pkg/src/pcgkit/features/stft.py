"""Short-time Fourier transform with a Hamming analysis window."""
from __future__ import annotations

import numpy as np

from pcgkit.features.base import FeatureKind, FeatureMap, FeatureParams


def hamming_window(n: int) -> np.ndarray:
    """w[k] = 0.54 - 0.46 cos(2 pi k / (n - 1)), symmetric, n >= 2."""
    if n < 2:
        raise ValueError("window length must be >= 2")
    k = np.arange(n)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * k / (n - 1))


def frame_signal(x: np.ndarray, frame: int, hop: int) -> np.ndarray:
    """Slice x into overlapping frames: row m is x[m*hop : m*hop + frame]."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < frame:
        raise ValueError(f"input of {x.size} samples is shorter than one {frame}-sample frame")
    return np.lib.stride_tricks.sliding_window_view(x, frame)[::hop].copy()


def stft(x: np.ndarray, params: FeatureParams | None = None) -> FeatureMap:
    """One-sided magnitude STFT.

    Output shape: (nfft // 2 + 1) rows by 1 + floor((len(x) - nfft) / hop)
    frames.
    """
    params = params or FeatureParams()
    frames = frame_signal(x, params.nfft, params.hop)
    windowed = frames * hamming_window(params.nfft)
    magnitude = np.abs(np.fft.rfft(windowed, axis=1))
    return FeatureMap(FeatureKind.STFT, magnitude.T, params)
