"""Minimal RIFF/WAV reader and writer.

Supports the formats the two PhysioNet datasets and the review tool need:
unsigned 8-bit PCM, signed 16-bit PCM, and IEEE 32-bit float, mono or
multi-channel (channels are averaged to mono on read).

Scaling conventions (chosen so that a write/read round trip is exact to
half an LSB):
    int16   <-> float via 32767 (read clamps -32768 to -1.0)
    uint8   <-> float via 127 around the 128 midpoint
    float32 read as-is, clamped to [-1, 1]
"""
from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

_FMT_PCM = 1
_FMT_IEEE_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE


class WavFormatError(ValueError):
    pass


def read_wav(source) -> tuple[np.ndarray, int]:
    """Read a WAV file into (float64 mono samples in [-1, 1], sample rate).

    Args:
        source: path, bytes, or binary file object.
    """
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = source.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError("not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            if size < 16:
                raise WavFormatError("fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise WavFormatError("missing fmt or data chunk")
    audio_format, n_channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if audio_format == _FMT_EXTENSIBLE:
        # Sub-format GUID starts with the real format tag.
        raise WavFormatError("WAVE_FORMAT_EXTENSIBLE is not supported")
    if n_channels < 1:
        raise WavFormatError("channel count must be >= 1")

    if audio_format == _FMT_PCM and bits == 16:
        raw = np.frombuffer(payload, dtype="<i2").astype(np.float64)
        samples = np.maximum(raw / 32767.0, -1.0)
    elif audio_format == _FMT_PCM and bits == 8:
        raw = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
        samples = np.clip((raw - 128.0) / 127.0, -1.0, 1.0)
    elif audio_format == _FMT_IEEE_FLOAT and bits == 32:
        samples = np.clip(np.frombuffer(payload, dtype="<f4").astype(np.float64), -1.0, 1.0)
    else:
        raise WavFormatError(f"unsupported WAV encoding: format={audio_format}, bits={bits}")

    if n_channels > 1:
        usable = (samples.size // n_channels) * n_channels
        samples = samples[:usable].reshape(-1, n_channels).mean(axis=1)
    return samples, int(sample_rate)


def _encode(samples: np.ndarray, encoding: str) -> tuple[bytes, int, int]:
    x = np.asarray(samples, dtype=np.float64)
    if encoding == "int16":
        ints = np.clip(np.rint(x * 32767.0), -32768, 32767).astype("<i2")
        return ints.tobytes(), _FMT_PCM, 16
    if encoding == "uint8":
        ints = np.clip(np.rint(x * 127.0) + 128.0, 0, 255).astype(np.uint8)
        return ints.tobytes(), _FMT_PCM, 8
    if encoding == "float32":
        return x.astype("<f4").tobytes(), _FMT_IEEE_FLOAT, 32
    raise ValueError(f"unknown encoding {encoding!r}")


def wav_bytes(samples: np.ndarray, sample_rate: int, encoding: str = "int16") -> bytes:
    """Serialize mono float samples in [-1, 1] to a WAV byte string."""
    payload, audio_format, bits = _encode(samples, encoding)
    block_align = bits // 8
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        audio_format,
        1,
        sample_rate,
        sample_rate * block_align,
        block_align,
        bits,
        b"data",
        len(payload),
    )
    return header + payload


def write_wav(path, samples: np.ndarray, sample_rate: int, encoding: str = "int16") -> None:
    Path(path).write_bytes(wav_bytes(samples, sample_rate, encoding))
