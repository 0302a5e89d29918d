"""VPRD binary descriptor interchange format.

Little-endian layout, version 1:

    magic   4 bytes   0x56 0x50 0x52 0x44 ("VPRD")
    u16     version   must be 1
    u16     reserved  must be 0
    u32     count     number of descriptors, > 0
    u32     dim       descriptor length, > 0
    u16     label_len, then UTF-8 technique label
    count * dim IEEE-754 32-bit floats, row-major
    count * (u16 len, then UTF-8 filename)

Any deviation (wrong magic, unknown version, nonzero reserved field,
truncated or oversized body, non-finite payload) raises VPRDFormatError.
Write followed by load is bit-exact on the float payload.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .descriptor import DescriptorSet
from .errors import VPRDFormatError

MAGIC = b"VPRD"
VERSION = 1

_HEADER = struct.Struct("<4sHHII")
_U16 = struct.Struct("<H")


def write_descriptor_file(dset: DescriptorSet, path: Path | str) -> int:
    """Serialize a descriptor set; returns the byte count written."""
    if dset.count == 0:
        raise ValueError("empty set")
    label = dset.technique.encode("utf-8")
    if len(label) > 0xFFFF:
        raise ValueError("technique label too long")
    parts = [
        _HEADER.pack(MAGIC, VERSION, 0, dset.count, dset.dim),
        _U16.pack(len(label)),
        label,
        np.ascontiguousarray(dset.vectors, dtype="<f4").tobytes(),
    ]
    for name in dset.filenames:
        encoded = name.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise ValueError(f"filename too long: {name!r}")
        parts.append(_U16.pack(len(encoded)))
        parts.append(encoded)
    blob = b"".join(parts)
    Path(path).write_bytes(blob)
    return len(blob)


class _Reader:
    def __init__(self, data: bytes, path: Path):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise VPRDFormatError(f"{self.path}: truncated while reading {what}")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk


def load_descriptor_file(path: Path | str) -> DescriptorSet:
    """Parse a VPRD file, validating every field."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise VPRDFormatError(f"cannot read {path}: {exc}") from exc

    r = _Reader(data, path)
    magic, version, reserved, count, dim = _HEADER.unpack(r.take(_HEADER.size, "header"))
    if magic != MAGIC:
        raise VPRDFormatError(f"{path}: not a VPRD file (magic {magic!r})")
    if version != VERSION:
        raise VPRDFormatError(f"{path}: unsupported version {version}")
    if reserved != 0:
        raise VPRDFormatError(f"{path}: reserved field must be 0, got {reserved}")
    if count == 0 or dim == 0:
        raise VPRDFormatError(f"{path}: empty set (count={count}, dim={dim})")

    (label_len,) = _U16.unpack(r.take(_U16.size, "label length"))
    try:
        label = r.take(label_len, "label").decode("utf-8")
    except UnicodeDecodeError as exc:
        raise VPRDFormatError(f"{path}: label is not valid UTF-8") from exc

    body = r.take(count * dim * 4, f"float body ({count}x{dim})")
    vectors = np.frombuffer(body, dtype="<f4").reshape(count, dim)
    if not np.all(np.isfinite(vectors)):
        raise VPRDFormatError(f"{path}: non-finite values in descriptor payload")

    filenames = []
    for i in range(count):
        (name_len,) = _U16.unpack(r.take(_U16.size, f"filename length {i}"))
        try:
            filenames.append(r.take(name_len, f"filename {i}").decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise VPRDFormatError(f"{path}: filename {i} is not valid UTF-8") from exc

    if r.pos != len(data):
        raise VPRDFormatError(f"{path}: {len(data) - r.pos} trailing bytes after payload")

    return DescriptorSet(technique=label, vectors=vectors.copy(), filenames=filenames)
