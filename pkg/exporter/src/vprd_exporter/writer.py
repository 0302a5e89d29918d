"""Minimal VPRD v1 writer.

Layout, little-endian: magic "VPRD", u16 version 1, u16 reserved 0,
u32 count, u32 dim, u16-prefixed UTF-8 technique label, count x dim
float32 vectors row-major, then one u16-prefixed UTF-8 filename per vector.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"VPRD"
VERSION = 1

_HEADER = struct.Struct("<4sHHII")
_U16 = struct.Struct("<H")


def write_vprd(path, technique: str, vectors: np.ndarray, filenames: list[str]) -> int:
    """Write one descriptor set; returns the byte count written."""
    arr = np.ascontiguousarray(vectors, dtype="<f4")
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"need a non-empty 2d array, got shape {arr.shape}")
    if arr.shape[0] != len(filenames):
        raise ValueError(f"{arr.shape[0]} vectors but {len(filenames)} filenames")
    if not np.isfinite(arr).all():
        raise ValueError("non-finite descriptor values")
    label = technique.encode("utf-8")
    if len(label) > 0xFFFF:
        raise ValueError("technique label too long")

    parts = [_HEADER.pack(MAGIC, VERSION, 0, arr.shape[0], arr.shape[1])]
    parts.append(_U16.pack(len(label)))
    parts.append(label)
    parts.append(arr.tobytes())
    for name in filenames:
        raw = name.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError(f"filename too long: {name!r}")
        parts.append(_U16.pack(len(raw)))
        parts.append(raw)

    blob = b"".join(parts)
    Path(path).write_bytes(blob)
    return len(blob)
