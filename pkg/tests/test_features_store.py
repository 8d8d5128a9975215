import numpy as np
import pytest

from pcgkit.features import (
    FeatureKind,
    FeatureParams,
    extract_feature_map,
    load_feature_map,
    save_feature_map,
    wst,
)
from pcgkit.features.store import FeatureFileError


def test_round_trip(tmp_path):
    fm = wst(np.random.default_rng(0).standard_normal(2048))
    path = tmp_path / "seg.pft"
    save_feature_map(path, fm)
    back = load_feature_map(path)
    assert back.kind is FeatureKind.WST
    assert back.params == fm.params
    np.testing.assert_allclose(back.data, fm.data, atol=1e-6)  # float32 storage


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "junk.pft"
    path.write_bytes(b"not a feature file")
    with pytest.raises(FeatureFileError):
        load_feature_map(path)


def test_truncated_payload_rejected(tmp_path):
    fm = wst(np.random.default_rng(1).standard_normal(2048))
    path = tmp_path / "seg.pft"
    save_feature_map(path, fm)
    blob = path.read_bytes()
    path.write_bytes(blob[:-40])
    with pytest.raises(FeatureFileError):
        load_feature_map(path)


def test_extract_dispatcher_kinds():
    x = np.random.default_rng(2).standard_normal(4000)
    for kind, rows in [(FeatureKind.STFT, 65), (FeatureKind.MFCC, 10)]:
        fm = extract_feature_map(x, 4000, kind)
        assert fm.kind is kind
        assert fm.shape[0] == rows


def test_extract_wst_log_switch():
    x = np.random.default_rng(3).standard_normal(4096)
    raw = extract_feature_map(x, 4000, FeatureKind.WST, log_scatter=False)
    logged = extract_feature_map(x, 4000, FeatureKind.WST, log_scatter=True)
    params = FeatureParams()
    np.testing.assert_allclose(
        logged.data, np.log(np.maximum(raw.data, params.log_floor)), atol=1e-12
    )
