"""Deterministic PNG rendering of feature maps for the review UI.

The encoder writes 8-bit RGB PNGs with stdlib zlib only, so identical maps
produce byte-identical files. Maps are log-scaled, min-max normalized, run
through a fixed color lookup table, flipped so low frequencies sit at the
bottom, and upscaled by an integer factor.
"""
from __future__ import annotations

import struct
import zlib

import numpy as np

LOG_FLOOR = 1e-10
DEFAULT_SCALE = 4

# Anchor colors (dark violet to yellow), linearly interpolated to 256 entries.
_ANCHORS = np.array(
    [
        (13, 8, 135),
        (84, 2, 163),
        (139, 10, 165),
        (185, 50, 137),
        (219, 92, 104),
        (244, 136, 73),
        (254, 188, 43),
        (240, 249, 33),
    ],
    dtype=np.float64,
)


def _build_lut() -> np.ndarray:
    positions = np.linspace(0.0, 1.0, len(_ANCHORS))
    xs = np.linspace(0.0, 1.0, 256)
    lut = np.stack([np.interp(xs, positions, _ANCHORS[:, c]) for c in range(3)], axis=1)
    return np.round(lut).astype(np.uint8)


COLOR_LUT = _build_lut()


def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
    )


def write_png(rgb: np.ndarray) -> bytes:
    """Encode an (h, w, 3) uint8 array as a non-interlaced RGB PNG."""
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ValueError("expected (h, w, 3) uint8 image")
    h, w, _ = rgb.shape
    header = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    raw = b"".join(b"\x00" + rgb[row].tobytes() for row in range(h))
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", header)
        + _png_chunk(b"IDAT", zlib.compress(raw, 9))
        + _png_chunk(b"IEND", b"")
    )


def render_feature_png(data: np.ndarray, scale: int = DEFAULT_SCALE) -> bytes:
    """Render one feature map; output is (rows * scale) x (cols * scale).

    A constant map (e.g. an all-zero segment) renders as a single color.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or scale < 1:
        raise ValueError("need a 2-D map and scale >= 1")
    img = np.log10(np.maximum(np.abs(data), LOG_FLOOR))
    lo, hi = img.min(), img.max()
    if hi - lo < 1e-12:
        idx = np.zeros(img.shape, dtype=np.uint8)
    else:
        idx = np.round(255.0 * (img - lo) / (hi - lo)).astype(np.uint8)
    idx = idx[::-1]  # low rows at the bottom of the picture
    rgb = COLOR_LUT[idx]
    rgb = np.repeat(np.repeat(rgb, scale, axis=0), scale, axis=1)
    return write_png(rgb)
