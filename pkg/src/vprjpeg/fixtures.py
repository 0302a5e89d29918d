"""Deterministic synthetic corpora for tests and demos.

Three flavors:

* photo:   textured scenes (layered sinusoids, soft blobs, gradient sky,
           grain) that compress like photographs: byte size and entropy both
           fall as compression rises.
* flat:    single-color frames, the degenerate low-information case; their
           entropy barely moves across the whole compression sweep.
* shifted: query/reference pairs where each reference is the same scene
           cropped a few pixels away, a small synthetic viewpoint change.

Every generator is seeded, writes PNG sources plus a manifest.json, and
returns the manifest path.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image


def _scene(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    """One textured RGB scene; per-call RNG state keeps scenes distinct."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)

    # Gradient sky with a random horizon tilt.
    tilt = rng.uniform(-0.3, 0.3)
    sky = 90 + 110 * (yy + tilt * xx) / height

    # Layered sinusoid texture at random frequencies and phases.
    tex = np.zeros_like(sky)
    for _ in range(4):
        fx, fy = rng.uniform(0.02, 0.45, size=2)
        phase = rng.uniform(0, 2 * np.pi)
        tex += rng.uniform(8, 30) * np.sin(fx * xx + fy * yy + phase)

    # Soft elliptical blobs standing in for foreground structure.
    blobs = np.zeros_like(sky)
    for _ in range(rng.integers(4, 9)):
        cx, cy = rng.uniform(0, width), rng.uniform(0, height)
        sx, sy = rng.uniform(width / 20, width / 4, size=2)
        amp = rng.uniform(-70, 70)
        blobs += amp * np.exp(-(((xx - cx) / sx) ** 2 + ((yy - cy) / sy) ** 2))

    grain = rng.normal(0, 6, size=sky.shape)
    base = sky + tex + blobs + grain

    channels = []
    for shift in rng.uniform(-25, 25, size=3):
        channels.append(np.clip(base + shift, 0, 255))
    return np.stack(channels, axis=-1).astype(np.uint8)


def _write_manifest(root: Path, doc: dict) -> Path:
    path = root / "manifest.json"
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


def generate_photo_corpus(
    out_dir: Path | str,
    count: int = 20,
    seed: int = 7,
    size: tuple[int, int] = (320, 240),
) -> Path:
    """Self-match corpus of textured scenes; query and reference share one directory."""
    root = Path(out_dir)
    images = root / "images"
    images.mkdir(parents=True, exist_ok=True)
    width, height = size
    for i in range(count):
        rng = np.random.default_rng(seed * 100_003 + i)
        Image.fromarray(_scene(rng, width, height)).save(images / f"img_{i:04d}.png")
    return _write_manifest(
        root, {"name": root.name, "query_dir": "images", "reference_dir": "images"}
    )


def generate_flat_corpus(
    out_dir: Path | str,
    count: int = 10,
    seed: int = 11,
    size: tuple[int, int] = (320, 240),
) -> Path:
    """Self-match corpus of constant-color frames."""
    root = Path(out_dir)
    images = root / "images"
    images.mkdir(parents=True, exist_ok=True)
    width, height = size
    rng = np.random.default_rng(seed)
    for i in range(count):
        color = rng.integers(30, 226, size=3)
        frame = np.broadcast_to(color, (height, width, 3)).astype(np.uint8)
        Image.fromarray(frame).save(images / f"flat_{i:04d}.png")
    return _write_manifest(
        root, {"name": root.name, "query_dir": "images", "reference_dir": "images"}
    )


def generate_shifted_corpus(
    out_dir: Path | str,
    count: int = 50,
    seed: int = 13,
    size: tuple[int, int] = (320, 240),
    shift: int = 4,
) -> Path:
    """Query/reference pairs differing by a small crop offset.

    Scene i is rendered shift pixels larger than the frame; the query crops
    at the origin and the reference at (shift, shift). Identity ground truth.
    """
    root = Path(out_dir)
    qdir = root / "query"
    rdir = root / "reference"
    qdir.mkdir(parents=True, exist_ok=True)
    rdir.mkdir(parents=True, exist_ok=True)
    width, height = size
    for i in range(count):
        rng = np.random.default_rng(seed * 100_003 + i)
        scene = _scene(rng, width + shift, height + shift)
        query = scene[0:height, 0:width]
        reference = scene[shift : shift + height, shift : shift + width]
        Image.fromarray(query).save(qdir / f"frame_{i:04d}.png")
        Image.fromarray(reference).save(rdir / f"frame_{i:04d}.png")
    return _write_manifest(
        root,
        {
            "name": root.name,
            "query_dir": "query",
            "reference_dir": "reference",
            "frame_tolerance": 0,
        },
    )
