from pcgkit.features.base import (
    FeatureKind,
    FeatureMap,
    FeatureParams,
    extract_feature_map,
    log_compress,
)
from pcgkit.features.mfcc import mel_filterbank, mfcc, pre_emphasis
from pcgkit.features.scattering import ScatteringFilterbank, wst
from pcgkit.features.stft import hamming_window, stft
from pcgkit.features.store import load_feature_map, save_feature_map

__all__ = [
    "FeatureKind",
    "FeatureMap",
    "FeatureParams",
    "extract_feature_map",
    "log_compress",
    "mel_filterbank",
    "mfcc",
    "pre_emphasis",
    "ScatteringFilterbank",
    "wst",
    "hamming_window",
    "stft",
    "load_feature_map",
    "save_feature_map",
]
