"""Fixed-length global image descriptors.

The built-in extractor is a histogram-of-oriented-gradients descriptor:
grayscale, bilinear resize to a square working resolution, central-difference
gradients, per-cell orientation histograms with linear interpolation between
the two nearest bin centers (unsigned orientation, wraparound at 180), and
L2-Hys block normalization. Externally computed descriptors enter through
the interchange format in vprd.py; everything downstream of this module
treats all techniques uniformly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from PIL import Image

from .jpeg_codec import to_grayscale

NORM_EPSILON = 1e-12

# L2-Hys: normalize, clip, renormalize.
HYS_CLIP = 0.2


@dataclass(frozen=True)
class HogParams:
    """Extractor configuration. Defaults give a 8100-dim descriptor:
    (128/8 - 2 + 1)^2 blocks x 2x2 cells x 9 bins."""

    resize: int = 128   # square working resolution, pixels
    cell: int = 8       # cell side, pixels
    block: int = 2      # block side, cells
    stride: int = 1     # block stride, cells
    bins: int = 9       # orientation bins over [0, 180)

    def __post_init__(self) -> None:
        if self.resize <= 0 or self.cell <= 0 or self.block <= 0 or self.stride <= 0:
            raise ValueError("resize, cell, block, and stride must be positive")
        if self.resize % self.cell != 0:
            raise ValueError(f"resize {self.resize} must be divisible by cell {self.cell}")
        if self.block > self.cells_per_side:
            raise ValueError(f"block {self.block} exceeds cells per side {self.cells_per_side}")
        if self.bins < 2:
            raise ValueError("need at least 2 orientation bins")

    @property
    def cells_per_side(self) -> int:
        return self.resize // self.cell

    @property
    def blocks_per_side(self) -> int:
        return (self.cells_per_side - self.block) // self.stride + 1

    @property
    def dim(self) -> int:
        return self.blocks_per_side**2 * self.block**2 * self.bins


def normalize(v: np.ndarray) -> np.ndarray:
    """L2-normalize, returning the zero vector when the norm is below epsilon."""
    arr = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("descriptor contains non-finite entries")
    n = np.linalg.norm(arr)
    if n < NORM_EPSILON:
        return np.zeros_like(arr)
    return arr / n


def _central_gradients(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """[-1, 0, 1] gradients with edge-replicated borders."""
    g = np.asarray(gray, dtype=np.float64)
    padded = np.pad(g, 1, mode="edge")
    gx = padded[1:-1, 2:] - padded[1:-1, :-2]
    gy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    return gx, gy


def hog_from_grayscale(gray: np.ndarray, params: HogParams = HogParams()) -> np.ndarray:
    """Descriptor of a grayscale raster already at the working resolution.

    Bin centers sit at multiples of 180/bins; each pixel's gradient magnitude
    is split linearly between the two nearest centers (wrapping 180 -> 0).
    Blocks are emitted row-major, each raveled as (cell_y, cell_x, bin).
    """
    g = np.asarray(gray, dtype=np.float64)
    if g.shape != (params.resize, params.resize):
        raise ValueError(f"expected {params.resize}x{params.resize} input, got {g.shape}")

    gx, gy = _central_gradients(g)
    mag = np.hypot(gx, gy)
    ang = np.degrees(np.arctan2(gy, gx)) % 180.0

    bin_width = 180.0 / params.bins
    t = ang / bin_width
    lower = np.floor(t).astype(np.int64)
    frac = t - lower
    lower %= params.bins
    upper = (lower + 1) % params.bins

    n = params.cells_per_side
    rows, cols = np.indices(g.shape)
    cy = rows // params.cell
    cx = cols // params.cell

    hist = np.zeros((n, n, params.bins), dtype=np.float64)
    np.add.at(hist, (cy, cx, lower), mag * (1.0 - frac))
    np.add.at(hist, (cy, cx, upper), mag * frac)

    feature = np.empty(params.dim, dtype=np.float64)
    block_len = params.block**2 * params.bins
    pos = 0
    for by in range(params.blocks_per_side):
        for bx in range(params.blocks_per_side):
            y0, x0 = by * params.stride, bx * params.stride
            vec = hist[y0 : y0 + params.block, x0 : x0 + params.block, :].ravel()
            n1 = np.linalg.norm(vec)
            if n1 < NORM_EPSILON:
                feature[pos : pos + block_len] = 0.0
            else:
                vec = np.minimum(vec / n1, HYS_CLIP)
                feature[pos : pos + block_len] = vec / np.linalg.norm(vec)
            pos += block_len
    return feature.astype(np.float32)


def compute_hog(image: np.ndarray, params: HogParams = HogParams()) -> np.ndarray:
    """Descriptor of a decoded raster: grayscale, bilinear resize, then HOG."""
    gray = to_grayscale(image)
    if gray.shape != (params.resize, params.resize):
        pil = Image.fromarray(gray, mode="L")
        gray = np.asarray(pil.resize((params.resize, params.resize), Image.BILINEAR))
    return hog_from_grayscale(gray, params)


@dataclass
class DescriptorSet:
    """All descriptors of one corpus under one technique.

    vectors is (count, dim) float32 in dataset index order; filenames has one
    entry per row. source_percent is the compression level the corpus was
    encoded at, or None for original images (not persisted by the
    interchange format).
    """

    technique: str
    vectors: np.ndarray
    filenames: list[str]
    source_percent: int | None = None

    def __post_init__(self) -> None:
        self.vectors = np.ascontiguousarray(self.vectors, dtype=np.float32)
        if self.vectors.ndim != 2 or self.vectors.shape[0] == 0 or self.vectors.shape[1] == 0:
            raise ValueError(f"vectors must be a non-empty (count, dim) array, got {self.vectors.shape}")
        if len(self.filenames) != self.vectors.shape[0]:
            raise ValueError(
                f"{len(self.filenames)} filenames for {self.vectors.shape[0]} descriptors"
            )
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("descriptor set contains non-finite values")

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __getitem__(self, index: int) -> np.ndarray:
        return self.vectors[index]


def hog_descriptor_set(
    images: Sequence[np.ndarray],
    filenames: Sequence[str],
    params: HogParams = HogParams(),
    technique: str = "hog",
    source_percent: int | None = None,
    workers: int = 1,
) -> DescriptorSet:
    """Extract one descriptor per raster, preserving input order."""
    if len(images) != len(filenames):
        raise ValueError("images and filenames must have equal length")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda im: compute_hog(im, params), images))
    else:
        rows = [compute_hog(im, params) for im in images]
    return DescriptorSet(
        technique=technique,
        vectors=np.stack(rows),
        filenames=list(filenames),
        source_percent=source_percent,
    )
