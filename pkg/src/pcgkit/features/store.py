"""Binary persistence for feature maps so training can skip re-extraction.

File layout: magic ``PCGF``, u32 version, u32 header length, JSON header
(kind, rows, cols, params, params hash), then row-major little-endian
float32 data.
"""
from __future__ import annotations

import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from pcgkit.features.base import FeatureKind, FeatureMap, FeatureParams

MAGIC = b"PCGF"
VERSION = 1


class FeatureFileError(ValueError):
    pass


def save_feature_map(path, fm: FeatureMap) -> None:
    rows, cols = fm.shape
    header = json.dumps(
        {
            "kind": fm.kind.value,
            "rows": rows,
            "cols": cols,
            "params": asdict(fm.params),
            "params_hash": fm.params.hash_hex(fm.kind),
        },
        sort_keys=True,
    ).encode()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(header)))
        fh.write(header)
        fh.write(fm.data.astype("<f4").tobytes())


def load_feature_map(path) -> FeatureMap:
    blob = Path(path).read_bytes()
    if blob[:4] != MAGIC:
        raise FeatureFileError(f"{path}: bad magic")
    version, header_len = struct.unpack_from("<II", blob, 4)
    if version != VERSION:
        raise FeatureFileError(f"{path}: unsupported version {version}")
    header = json.loads(blob[12 : 12 + header_len])
    data = np.frombuffer(blob[12 + header_len :], dtype="<f4").astype(np.float64)
    rows, cols = header["rows"], header["cols"]
    if data.size != rows * cols:
        raise FeatureFileError(f"{path}: payload size does not match header")
    fm = FeatureMap(
        FeatureKind(header["kind"]),
        data.reshape(rows, cols),
        FeatureParams(**header["params"]),
    )
    if fm.params.hash_hex(fm.kind) != header["params_hash"]:
        raise FeatureFileError(f"{path}: params hash mismatch")
    return fm
