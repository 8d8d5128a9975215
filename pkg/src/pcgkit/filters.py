"""Butterworth low-pass filtering for out-of-band noise rejection.

The digital filter is designed from the analog Butterworth prototype via the
bilinear transform with cutoff pre-warping, then factored into cascaded
second-order sections (SOS) for numerical stability. Filtering is causal
(forward only).
"""
from __future__ import annotations

import cmath
import math

import numpy as np

DEFAULT_ORDER = 5
DEFAULT_CUTOFF_HZ = 500.0


def butter_lowpass_sos(cutoff_hz: float, fs_hz: float, order: int = DEFAULT_ORDER) -> np.ndarray:
    """Design a digital Butterworth low-pass as second-order sections.

    Args:
        cutoff_hz: -3 dB frequency; must lie strictly below Nyquist.
        fs_hz: sample rate.
        order: filter order, >= 1.

    Returns:
        Array of shape (n_sections, 6); each row is (b0, b1, b2, 1, a1, a2).
        Odd orders contribute one first-order section (b2 = a2 = 0).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if not 0.0 < cutoff_hz < fs_hz / 2.0:
        raise ValueError(f"cutoff {cutoff_hz} Hz must lie in (0, Nyquist={fs_hz / 2.0})")

    # Analog prototype poles on the left unit semicircle, scaled by the
    # pre-warped cutoff so the bilinear transform lands -3 dB exactly at fc.
    warped = 2.0 * fs_hz * math.tan(math.pi * cutoff_hz / fs_hz)
    poles = [
        warped * cmath.exp(1j * math.pi * (2.0 * k + order - 1.0) / (2.0 * order))
        for k in range(1, order + 1)
    ]

    # Bilinear transform s -> 2fs (1 - z^-1) / (1 + z^-1); all zeros map to z = -1.
    zpoles = [(2.0 * fs_hz + p) / (2.0 * fs_hz - p) for p in poles]

    # Pair complex-conjugate poles; a leftover real pole makes a 1st-order section.
    conj_pairs = []
    real_poles = []
    for p in zpoles:
        if abs(p.imag) < 1e-12:
            real_poles.append(p.real)
        elif p.imag > 0:
            conj_pairs.append(p)

    sections = []
    for p in sorted(conj_pairs, key=lambda q: abs(q)):  # most damped first
        a1 = -2.0 * p.real
        a2 = abs(p) ** 2
        gain = (1.0 + a1 + a2) / 4.0  # unit DC gain; numerator (1 + z^-1)^2
        sections.append([gain, 2.0 * gain, gain, 1.0, a1, a2])
    for r in real_poles:
        gain = (1.0 - r) / 2.0
        sections.append([gain, gain, 0.0, 1.0, -r, 0.0])
    return np.array(sections, dtype=np.float64)


def sosfilt(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply cascaded biquads causally (direct form II transposed)."""
    y = [float(v) for v in np.asarray(x, dtype=np.float64)]
    for b0, b1, b2, _a0, a1, a2 in np.asarray(sos, dtype=np.float64):
        w1 = 0.0
        w2 = 0.0
        for n, xn in enumerate(y):
            yn = b0 * xn + w1
            w1 = b1 * xn - a1 * yn + w2
            w2 = b2 * xn - a2 * yn
            y[n] = yn
    return np.array(y, dtype=np.float64)


def sos_frequency_response(sos: np.ndarray, f_hz, fs_hz: float) -> np.ndarray:
    """Evaluate the cascade's complex response H(e^{j 2 pi f / fs})."""
    f = np.atleast_1d(np.asarray(f_hz, dtype=np.float64))
    z = np.exp(-2j * math.pi * f / fs_hz)
    h = np.ones_like(z, dtype=np.complex128)
    for b0, b1, b2, _a0, a1, a2 in np.asarray(sos, dtype=np.float64):
        h *= (b0 + b1 * z + b2 * z**2) / (1.0 + a1 * z + a2 * z**2)
    return h


def butterworth_lowpass(
    x: np.ndarray,
    fs_hz: float,
    order: int = DEFAULT_ORDER,
    cutoff_hz: float = DEFAULT_CUTOFF_HZ,
) -> np.ndarray:
    """Low-pass filter a signal; output length equals input length.

    Raises:
        ValueError: cutoff at or above Nyquist, or non-finite input samples.
    """
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite samples")
    sos = butter_lowpass_sos(cutoff_hz, fs_hz, order)
    return sosfilt(sos, x)
