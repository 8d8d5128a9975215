"""Wavelet scattering transform for 1-D signals.

A cascade of complex Morlet band-pass convolutions, modulus nonlinearities,
and Gaussian low-pass averaging at scale 2^J, subsampled by 2^J:

    order 0:  x * phi
    order 1:  |x * psi_l1| * phi
    order 2:  ||x * psi_l1| * psi_l2| * phi

First-order wavelets place Q per octave; second-order wavelets use one per
octave. A second-order path (l1, l2) is kept only when the second wavelet's
center frequency falls below the first wavelet's envelope bandwidth, so it
can still resolve the envelope fluctuations of the first stage.

Filters live in the DFT domain (circular convolution); they are built once
per (signal length, J, Q) and cached, and the band-pass banks are rescaled so
the Littlewood-Paley sum stays at or below one, which makes the whole
transform non-expansive.
"""
from __future__ import annotations

import numpy as np

from pcgkit.features.base import FeatureKind, FeatureMap, FeatureParams

# Center frequency of the highest-frequency wavelet (cycles per sample).
XI_MAX = 0.35
# Bandwidth of the scale-J low-pass is SIGMA0 / 2^J; small enough that shifts
# up to 2^J / 4 samples barely move the averaged coefficients.
SIGMA0 = 0.05
# Wavelet bandwidth factor: adjacent filters spaced 2^(1/Q) apart cross near
# half power when sigma = 0.425 * xi * (2^(1/Q) - 1).
BANDWIDTH_FACTOR = 0.425


def _signed_freqs(n: int) -> np.ndarray:
    return np.fft.fftfreq(n)


def _gaussian_lowpass_hat(n: int, sigma_f: float) -> np.ndarray:
    f = _signed_freqs(n)
    return np.exp(-(f**2) / (2.0 * sigma_f**2))


def _morlet_hat(n: int, xi: float, sigma_f: float) -> np.ndarray:
    """Analytic Morlet in the DFT domain: Gaussian bump on positive bins only.

    Bin 0 stays zero, so the time-domain wavelet has exactly zero mean.
    """
    f = _signed_freqs(n)
    hat = np.exp(-((f - xi) ** 2) / (2.0 * sigma_f**2))
    hat[f <= 0.0] = 0.0
    if n % 2 == 0:  # keep the shared Nyquist bin
        hat[n // 2] = np.exp(-((0.5 - xi) ** 2) / (2.0 * sigma_f**2))
    return hat


def _enforce_littlewood_paley(phi_hat: np.ndarray, psi_hats: list[np.ndarray]) -> None:
    """Scale the band-pass bank so phi^2 + sum psi^2 <= 1 everywhere."""
    if not psi_hats:
        return
    power = np.sum([h**2 for h in psi_hats], axis=0)
    live = power > 0.0
    if not np.any(live):
        return
    headroom = np.clip(1.0 - phi_hat[live] ** 2, 0.0, None)
    scale = min(1.0, float(np.sqrt(np.min(headroom / power[live]))))
    for h in psi_hats:
        h *= scale


class ScatteringFilterbank:
    """Immutable Morlet filter set for one signal length; share freely."""

    _cache: dict[tuple[int, int, int], "ScatteringFilterbank"] = {}

    def __init__(self, n: int, j: int, q: int) -> None:
        if 2**j > n:
            raise ValueError(f"averaging scale 2^{j} exceeds signal length {n}")
        self.n = n
        self.j = j
        self.q = q
        self.stride = 2**j

        sigma_low = SIGMA0 / 2**j
        self.phi_hat = _gaussian_lowpass_hat(n, sigma_low)

        def bank(per_octave: int):
            xis, sigmas, hats = [], [], []
            count = j * per_octave
            for k in range(count):
                xi = XI_MAX * 2.0 ** (-k / per_octave)
                sigma = max(BANDWIDTH_FACTOR * xi * (2.0 ** (1.0 / per_octave) - 1.0), sigma_low)
                xis.append(xi)
                sigmas.append(sigma)
                hats.append(_morlet_hat(n, xi, sigma))
            _enforce_littlewood_paley(self.phi_hat, hats)
            return xis, sigmas, hats

        self.xi1, self.sigma1, self.psi1_hats = bank(q)
        self.xi2, self.sigma2, self.psi2_hats = bank(1)

        # Admissible second-order pairs: the second center frequency must sit
        # below the first wavelet's envelope bandwidth.
        self.pairs: list[tuple[int, int]] = [
            (i1, i2)
            for i1, xi1 in enumerate(self.xi1)
            for i2, xi2 in enumerate(self.xi2)
            if xi2 <= xi1 * (2.0 ** (1.0 / q) - 1.0)
        ]

    @classmethod
    def for_signal(cls, n: int, j: int, q: int) -> "ScatteringFilterbank":
        key = (n, j, q)
        fb = cls._cache.get(key)
        if fb is None:
            fb = cls._cache[key] = cls(n, j, q)
        return fb

    def path_labels(self, order: int) -> list[tuple]:
        paths: list[tuple] = [()]
        if order >= 1:
            paths += [(i1,) for i1 in range(len(self.xi1))]
        if order >= 2:
            paths += list(self.pairs)
        return paths

    def n_rows(self, order: int) -> int:
        return len(self.path_labels(order))

    def n_frames(self) -> int:
        return -(-self.n // self.stride)

    def lowpass_subsample(self, z_hat: np.ndarray) -> np.ndarray:
        return np.fft.ifft(z_hat * self.phi_hat).real[:: self.stride]


def wst(x: np.ndarray, params: FeatureParams | None = None) -> FeatureMap:
    """Scattering coefficients of shape (1 + order-1 paths + order-2 paths,
    ceil(len(x) / 2^J))."""
    params = params or FeatureParams()
    x = np.asarray(x, dtype=np.float64)
    fb = ScatteringFilterbank.for_signal(x.size, params.wst_j, params.wst_q)

    rows = []
    x_hat = np.fft.fft(x)
    rows.append(fb.lowpass_subsample(x_hat))

    if params.wst_order >= 1:
        envelopes = []
        for psi1 in fb.psi1_hats:
            env = np.abs(np.fft.ifft(x_hat * psi1))
            envelopes.append(env)
            rows.append(fb.lowpass_subsample(np.fft.fft(env)))
        if params.wst_order >= 2:
            env_hats = {}
            for i1, i2 in fb.pairs:
                if i1 not in env_hats:
                    env_hats[i1] = np.fft.fft(envelopes[i1])
                env2 = np.abs(np.fft.ifft(env_hats[i1] * fb.psi2_hats[i2]))
                rows.append(fb.lowpass_subsample(np.fft.fft(env2)))

    return FeatureMap(FeatureKind.WST, np.stack(rows), params)
