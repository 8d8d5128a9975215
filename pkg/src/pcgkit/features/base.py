"""Feature-map container, extraction parameters, and the kind dispatcher."""
from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np


class FeatureKind(str, enum.Enum):
    STFT = "stft"
    MFCC = "mfcc"
    WST = "wst"


@dataclass(frozen=True)
class FeatureParams:
    """Extraction knobs. Defaults follow the training configuration in use:
    nfft=128, hop=16, n_mfcc=10, Q=2, J=4."""

    nfft: int = 128
    hop: int = 16
    n_mfcc: int = 10
    n_mels: int = 26
    pre_emphasis_alpha: float = 0.97
    wst_j: int = 4
    wst_q: int = 2
    wst_order: int = 2
    log_floor: float = 1e-10

    def __post_init__(self) -> None:
        if self.nfft < 2 or self.hop < 1:
            raise ValueError("nfft must be >= 2 and hop >= 1")
        if not 0.95 <= self.pre_emphasis_alpha <= 0.97:
            raise ValueError("pre-emphasis alpha is expected in [0.95, 0.97]")
        if self.n_mfcc < 1 or self.n_mels < 2 or self.n_mfcc > self.n_mels:
            raise ValueError("need 1 <= n_mfcc <= n_mels and n_mels >= 2")
        if self.wst_j < 1 or self.wst_q < 1:
            raise ValueError("scattering scale J and density Q must be >= 1")
        if not 0 <= self.wst_order <= 2:
            raise ValueError("scattering order must be 0, 1, or 2")

    def hash_hex(self, kind: FeatureKind) -> str:
        payload = json.dumps({"kind": kind.value, **asdict(self)}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class FeatureMap:
    """2-D time-frequency representation: rows are frequency bins, cepstral
    coefficients, or scattering paths; columns are time frames."""

    kind: FeatureKind
    data: np.ndarray
    params: FeatureParams

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise ValueError("feature map must be 2-D")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("feature map contains non-finite entries")

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def log_compress(data: np.ndarray, floor: float) -> np.ndarray:
    """Dynamic-range compression used before feeding maps to the networks."""
    return np.log(np.maximum(data, floor))


def extract_feature_map(
    x: np.ndarray,
    sample_rate_hz: int,
    kind: FeatureKind,
    params: FeatureParams | None = None,
    log_scatter: bool = True,
) -> FeatureMap:
    """Run one of the three extractors on a 1-D segment.

    Scattering output is log-compressed by default (``log_scatter`` switches
    it off); STFT and MFCC are returned as defined.
    """
    from pcgkit.features.mfcc import mfcc
    from pcgkit.features.scattering import wst
    from pcgkit.features.stft import stft

    params = params or FeatureParams()
    if kind is FeatureKind.STFT:
        return stft(x, params)
    if kind is FeatureKind.MFCC:
        return mfcc(x, sample_rate_hz, params)
    if kind is FeatureKind.WST:
        fm = wst(x, params)
        if log_scatter:
            fm.data = log_compress(fm.data, params.log_floor)
        return fm
    raise ValueError(f"unknown feature kind {kind!r}")
