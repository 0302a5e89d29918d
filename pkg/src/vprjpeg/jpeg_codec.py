"""JPEG compression sweeps over image corpora, with byte-size accounting.

Compression strength is expressed as a percentage p in [0, 99]; the encoder
quality handed to the baseline JPEG encoder is 100 - p, so p = 0 re-encodes
at quality 100 and p = 97 means quality 3. Chroma is kept at full resolution
(4:4:4) for mild compression and subsampled to 4:2:0 once p reaches the
extreme range.

The encoder is pinned to Pillow's baseline JPEG writer; its version string is
exposed as ENCODER_VERSION and recorded in run sidecars because byte sizes
are part of the results.
"""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import PIL
from PIL import Image, UnidentifiedImageError

from .dataset import DatasetManifest, ImageRecord
from .errors import DecodeError, EncodeError

# Default sweep, mild to extreme.
DEFAULT_LEVELS = (0, 50, 80, 90, 95, 97)

# Percent at and above which 4:2:0 chroma subsampling is enabled.
SUBSAMPLING_THRESHOLD = 90

ENCODER_VERSION = f"Pillow {PIL.__version__} jpeg={Image.core.jpeglib_version}"

_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float64)


@dataclass(frozen=True, order=True)
class CompressionLevel:
    """A compression percentage and its derived encoder quality."""

    percent: int

    def __post_init__(self) -> None:
        if not isinstance(self.percent, int) or not 0 <= self.percent <= 99:
            raise ValueError(f"compression percent must be an integer in [0, 99], got {self.percent!r}")

    @property
    def encoder_quality(self) -> int:
        return 100 - self.percent

    @property
    def chroma_subsampling(self) -> str:
        return "4:2:0" if self.percent >= SUBSAMPLING_THRESHOLD else "4:4:4"


def _as_level(level: CompressionLevel | int) -> CompressionLevel:
    return level if isinstance(level, CompressionLevel) else CompressionLevel(int(level))


def compress_image(image: np.ndarray, level: CompressionLevel | int) -> bytes:
    """Encode a decoded raster as a baseline JPEG stream at the given level.

    The output decodes back to the same pixel dimensions. Raises EncodeError
    for empty input or encoder failure.
    """
    level = _as_level(level)
    arr = np.asarray(image)
    if arr.size == 0:
        raise EncodeError("cannot encode a zero-sized image")
    if arr.dtype != np.uint8:
        raise EncodeError(f"expected an 8-bit raster, got dtype {arr.dtype}")
    # Pillow subsampling codes: 0 = 4:4:4, 2 = 4:2:0.
    subsampling = 2 if level.percent >= SUBSAMPLING_THRESHOLD else 0
    try:
        pil = Image.fromarray(arr)
        buf = io.BytesIO()
        pil.save(buf, format="JPEG", quality=level.encoder_quality, subsampling=subsampling)
    except Exception as exc:
        raise EncodeError(f"JPEG encode failed: {exc}") from exc
    return buf.getvalue()


def decode_image(data: bytes) -> np.ndarray:
    """Decode a JPEG or PNG stream into an 8-bit RGB raster (H, W, 3)."""
    try:
        with Image.open(io.BytesIO(data)) as pil:
            return np.asarray(pil.convert("RGB"))
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"could not decode image stream: {exc}") from exc


def read_image(path: Path | str) -> np.ndarray:
    """Decode an image file into an 8-bit RGB raster."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise DecodeError(f"could not read {path}: {exc}") from exc
    try:
        return decode_image(data)
    except DecodeError as exc:
        raise DecodeError(f"{path}: {exc}") from exc


def to_grayscale(raster: np.ndarray) -> np.ndarray:
    """BT.601 luma, rounded to nearest integer: Y = 0.299 R + 0.587 G + 0.114 B."""
    arr = np.asarray(raster)
    if arr.ndim == 2:
        return arr.astype(np.uint8, copy=False)
    if arr.ndim == 3 and arr.shape[2] == 3:
        luma = arr.astype(np.float64) @ _LUMA_WEIGHTS
        return np.rint(luma).astype(np.uint8)
    raise ValueError(f"expected (H, W) or (H, W, 3) raster, got shape {arr.shape}")


def psnr(reference: np.ndarray, test: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB between two 8-bit rasters."""
    a = np.asarray(reference, dtype=np.float64)
    b = np.asarray(test, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return float("inf")
    return float(10.0 * np.log10(255.0**2 / mse))


@dataclass(frozen=True)
class ImageSizeEntry:
    """Byte size of one encoded image at one compression level."""

    percent: int
    role: str  # "query" | "reference"
    image_index: int
    filename: str
    bytes: int


@dataclass(frozen=True)
class EncodeFailure:
    percent: int
    role: str
    filename: str
    reason: str


@dataclass
class CompressionSweepResult:
    """Size accounting for one manifest compressed at a set of levels."""

    dataset: str
    levels: tuple[int, ...]
    entries: list[ImageSizeEntry] = field(default_factory=list)
    failures: list[EncodeFailure] = field(default_factory=list)

    def totals_by_level(self) -> dict[int, int]:
        totals = {p: 0 for p in self.levels}
        for e in self.entries:
            totals[e.percent] += e.bytes
        return totals

    def total_bytes(self, percent: int) -> int:
        return sum(e.bytes for e in self.entries if e.percent == percent)

    def mean_bytes(self, percent: int) -> float:
        sizes = [e.bytes for e in self.entries if e.percent == percent]
        if not sizes:
            raise ValueError(f"no entries for level {percent}")
        return sum(sizes) / len(sizes)

    def per_image_bytes(self, percent: int, role: str) -> list[int]:
        return [e.bytes for e in self.entries if e.percent == percent and e.role == role]


def corpus_dir(out_dir: Path | str, percent: int, role: str) -> Path:
    """Location of one compressed corpus inside a sweep output tree."""
    return Path(out_dir) / str(percent) / role


def _encode_one(
    src: Path, record: ImageRecord, level: CompressionLevel, dest: Path
) -> tuple[int, str | None]:
    """Returns (bytes written, error string or None)."""
    try:
        raster = read_image(src)
        data = compress_image(raster, level)
    except (DecodeError, EncodeError) as exc:
        return 0, str(exc)
    dest.write_bytes(data)
    return len(data), None


def sweep_compress(
    manifest: DatasetManifest,
    levels: Sequence[CompressionLevel | int],
    out_dir: Path | str,
    workers: int = 1,
) -> CompressionSweepResult:
    """Write one compressed corpus per level and role under out_dir.

    Tree: out_dir/<percent>/<role>/<basename>.jpg with role in
    {query, reference}. Per-image encode errors are recorded in the result
    rather than raised; re-running overwrites byte-identically.
    """
    if not levels:
        raise ValueError("levels must be non-empty")
    level_objs = [_as_level(p) for p in levels]
    if len({l.percent for l in level_objs}) != len(level_objs):
        raise ValueError("duplicate compression levels")
    out_dir = Path(out_dir)

    roles = [
        ("query", manifest.query_dir, manifest.queries),
        ("reference", manifest.reference_dir, manifest.references),
    ]
    jobs = []  # (level, role, record, src, dest)
    for level in level_objs:
        for role, src_dir, records in roles:
            dest_dir = corpus_dir(out_dir, level.percent, role)
            dest_dir.mkdir(parents=True, exist_ok=True)
            for rec in records:
                src = src_dir / rec.filename
                dest = dest_dir / (Path(rec.filename).stem + ".jpg")
                jobs.append((level, role, rec, src, dest))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda j: _encode_one(j[3], j[2], j[0], j[4]), jobs))
    else:
        outcomes = [_encode_one(src, rec, level, dest) for level, role, rec, src, dest in jobs]

    result = CompressionSweepResult(dataset=manifest.name, levels=tuple(l.percent for l in level_objs))
    for (level, role, rec, _src, _dest), (size, err) in zip(jobs, outcomes):
        if err is not None:
            result.failures.append(EncodeFailure(level.percent, role, rec.filename, err))
        else:
            result.entries.append(
                ImageSizeEntry(level.percent, role, rec.index, rec.filename, size)
            )
    return result
