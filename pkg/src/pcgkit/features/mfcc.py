"""Mel-frequency cepstral coefficients.

Pipeline: pre-emphasis, framing, Hamming window, power spectrum, triangular
mel filter bank energies, floored log, orthonormal DCT-II, keep the first
n_mfcc rows.
"""
from __future__ import annotations

import numpy as np

from pcgkit.features.base import FeatureKind, FeatureMap, FeatureParams
from pcgkit.features.stft import frame_signal, hamming_window


def pre_emphasis(x: np.ndarray, alpha: float) -> np.ndarray:
    """y[n] = x[n] - alpha * x[n-1], with y[0] = x[0]."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    x = np.asarray(x, dtype=np.float64)
    y = x.copy()
    y[1:] -= alpha * x[:-1]
    return y


def hz_to_mel(f_hz):
    return 2595.0 * np.log10(1.0 + np.asarray(f_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, nfft: int, fs_hz: float) -> np.ndarray:
    """Unit-peak triangular filters, centers equally spaced on the mel scale.

    Returns an (n_mels, nfft // 2 + 1) weight matrix. Filter m spans the mel
    interval between centers m-1 and m+1, so adjacent filters overlap by 50%.

    Raises:
        ValueError: adjacent filter centers collapse onto the same FFT bin
            (n_mels too large for the nfft resolution).
    """
    if n_mels < 2:
        raise ValueError("need at least 2 mel filters")
    edges_hz = mel_to_hz(np.linspace(0.0, hz_to_mel(fs_hz / 2.0), n_mels + 2))
    centers = edges_hz[1:-1]
    bin_width = fs_hz / nfft
    center_bins = np.floor(centers / bin_width).astype(int)
    if np.any(np.diff(center_bins) < 1):
        raise ValueError(
            f"{n_mels} mel filters collapse at nfft={nfft}: adjacent centers share a bin"
        )
    freqs = np.arange(nfft // 2 + 1) * bin_width
    bank = np.zeros((n_mels, freqs.size))
    for m in range(n_mels):
        lo, mid, hi = edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]
        rising = (freqs - lo) / (mid - lo)
        falling = (hi - freqs) / (hi - mid)
        bank[m] = np.clip(np.minimum(rising, falling), 0.0, None)
    return bank


def dct2_orthonormal_matrix(m: int) -> np.ndarray:
    """Orthonormal DCT-II basis: row n is s_n * cos(pi * n * (k + 1/2) / m)."""
    n = np.arange(m)[:, None]
    k = np.arange(m)[None, :]
    mat = np.cos(np.pi * n * (k + 0.5) / m)
    mat[0] *= np.sqrt(1.0 / m)
    mat[1:] *= np.sqrt(2.0 / m)
    return mat


def mfcc(x: np.ndarray, sample_rate_hz: float, params: FeatureParams | None = None) -> FeatureMap:
    """MFCC map of shape (n_mfcc, frames)."""
    params = params or FeatureParams()
    emphasized = pre_emphasis(x, params.pre_emphasis_alpha)
    frames = frame_signal(emphasized, params.nfft, params.hop)
    spectrum = np.fft.rfft(frames * hamming_window(params.nfft), axis=1)
    power = np.abs(spectrum) ** 2
    bank = mel_filterbank(params.n_mels, params.nfft, sample_rate_hz)
    energies = power @ bank.T
    log_energies = np.log(np.maximum(energies, params.log_floor))
    dct = dct2_orthonormal_matrix(params.n_mels)[: params.n_mfcc]
    coeffs = log_energies @ dct.T
    return FeatureMap(FeatureKind.MFCC, coeffs.T, params)
