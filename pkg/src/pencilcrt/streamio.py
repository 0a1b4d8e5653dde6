"""Binary sample-stream files.

Layout: 8-byte magic ``SNYQSTRM``, a little-endian uint32 byte length, a JSON
header ``{"rate_hz": ..., "n_samples": ..., "start_index": ...}`` in UTF-8,
then n_samples little-endian float64 (real, imag) pairs. Self-describing and
bit-exact across platforms.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .signal_model import SampledStream

__all__ = ["MAGIC", "write_stream", "read_stream", "StreamFormatError"]

MAGIC = b"SNYQSTRM"
_HEADER_KEYS = {"rate_hz", "n_samples", "start_index"}


class StreamFormatError(Exception):
    """File is not a valid stream container."""


def write_stream(path, stream: SampledStream) -> None:
    header = json.dumps(
        {
            "rate_hz": stream.rate_hz,
            "n_samples": len(stream),
            "start_index": stream.start_index,
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    payload = np.empty(2 * len(stream), dtype="<f8")
    payload[0::2] = stream.samples.real
    payload[1::2] = stream.samples.imag
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(payload.tobytes())


def read_stream(path) -> SampledStream:
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 4 or raw[: len(MAGIC)] != MAGIC:
        raise StreamFormatError(f"{path}: missing {MAGIC.decode()} magic")
    offset = len(MAGIC)
    (header_len,) = struct.unpack_from("<I", raw, offset)
    offset += 4
    if len(raw) < offset + header_len:
        raise StreamFormatError(f"{path}: truncated header")
    try:
        header = json.loads(raw[offset : offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise StreamFormatError(f"{path}: bad header JSON: {exc}") from exc
    if set(header) != _HEADER_KEYS:
        raise StreamFormatError(
            f"{path}: header keys {sorted(header)} != {sorted(_HEADER_KEYS)}"
        )
    offset += header_len
    n = int(header["n_samples"])
    expected = 16 * n
    body = raw[offset:]
    if len(body) != expected:
        raise StreamFormatError(
            f"{path}: payload holds {len(body)} bytes, expected {expected}"
        )
    flat = np.frombuffer(body, dtype="<f8")
    samples = flat[0::2] + 1j * flat[1::2]
    return SampledStream(
        rate_hz=float(header["rate_hz"]),
        samples=samples,
        start_index=int(header["start_index"]),
    )
