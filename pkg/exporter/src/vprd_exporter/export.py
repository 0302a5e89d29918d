"""Batch inference over a corpus directory into one VPRD file."""

from __future__ import annotations

import datetime
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torchvision
from PIL import Image, UnidentifiedImageError

from . import __version__, preprocess
from .errors import CorpusError, ModelError
from .model import DEFAULT_SEED, load_extractor, state_digest
from .writer import write_vprd

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg", ".bmp"}


@dataclass
class ExportJob:
    corpus: Path
    model: str = "alexnet"
    layer: str = "fc6"
    out: Path = Path("descriptors.vprd")
    batch: int = 32
    weights: str = "seeded"
    seed: int = DEFAULT_SEED
    on_error: str = "abort"

    def __post_init__(self):
        self.corpus = Path(self.corpus)
        self.out = Path(self.out)
        if self.batch < 1:
            raise ValueError(f"batch size must be at least 1, got {self.batch}")
        if self.on_error not in ("abort", "skip"):
            raise ValueError(f"on_error must be abort or skip, got {self.on_error!r}")


def list_corpus(directory: Path) -> list[Path]:
    if not directory.is_dir():
        raise CorpusError(f"not a directory: {directory}")
    paths = sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS
    )
    if not paths:
        raise CorpusError(f"no images in {directory}")
    return paths


def _load_tensors(paths, on_error):
    """Decode and preprocess, dropping failures only in skip mode."""
    tensors, names = [], []
    for path in paths:
        try:
            with Image.open(path) as img:
                tensors.append(preprocess.image_to_tensor(img))
        except (UnidentifiedImageError, OSError) as exc:
            if on_error == "abort":
                raise CorpusError(f"undecodable image {path}: {exc}") from exc
            print(f"warning: skipping {path}: {exc}", file=sys.stderr)
            continue
        names.append(path.name)
    return tensors, names


def export_descriptors(job: ExportJob) -> Path:
    """Run the extractor over the corpus and write the VPRD file plus a
    sidecar recording weights digest and preprocessing constants."""
    paths = list_corpus(job.corpus)
    extractor = load_extractor(job.model, job.layer, weights=job.weights, seed=job.seed)
    tensors, names = _load_tensors(paths, job.on_error)
    if not tensors:
        raise CorpusError(f"every image in {job.corpus} failed to decode")

    chunks = []
    with torch.no_grad():
        for i in range(0, len(tensors), job.batch):
            batch = torch.stack(tensors[i : i + job.batch])
            chunks.append(extractor(batch).numpy())
    vectors = np.concatenate(chunks).astype(np.float32)

    if vectors.shape[1] != extractor.dim:
        raise ModelError(
            f"layer {job.layer} produced dim {vectors.shape[1]}, expected {extractor.dim}"
        )
    if not np.isfinite(vectors).all():
        raise ModelError("non-finite activations in export")

    technique = f"{job.model}-{job.layer}"
    job.out.parent.mkdir(parents=True, exist_ok=True)
    write_vprd(job.out, technique, vectors, names)
    _write_sidecar(job, extractor, len(names))
    return job.out


def _write_sidecar(job: ExportJob, extractor, count: int) -> None:
    meta = {
        "tool": "vprd-export",
        "version": __version__,
        "model": job.model,
        "layer": job.layer,
        "activation": "relu",
        "weights": job.weights,
        "seed": job.seed if job.weights == "seeded" else None,
        "state_sha256": state_digest(extractor),
        "dim": extractor.dim,
        "count": count,
        "batch": job.batch,
        "corpus": str(job.corpus),
        "preprocessing": preprocess.constants(),
        "torch": torch.__version__,
        "torchvision": torchvision.__version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    sidecar = job.out.with_name(job.out.name + ".meta.json")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
