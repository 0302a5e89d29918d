"""Retrieval accuracy, image entropy, degradation curves, non-uniform grids.

Accuracy follows the reference-count convention: correct matches divided by
the number of reference images. When query and reference counts differ this
caps below 1, so every result also carries the per-query rate. Entropy is
Shannon entropy of the 256-bin grayscale histogram, in bits.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .dataset import DatasetManifest, GroundTruthEntry, accepted_refs
from .descriptor import DescriptorSet
from .errors import DataError
from .jpeg_codec import corpus_dir, read_image, to_grayscale
from .matcher import MatchRecord, match_all


@dataclass
class EvaluationResult:
    """One (technique, query level, reference level) cell."""

    technique: str
    query_percent: int | None
    ref_percent: int | None
    n_correct: int
    n_refs: int
    n_queries: int
    records: list[MatchRecord] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.n_correct / self.n_refs

    @property
    def accuracy_per_query(self) -> float:
        return self.n_correct / self.n_queries


def accuracy(
    records: Sequence[MatchRecord],
    gt: Mapping[int, GroundTruthEntry],
    n_refs: int,
    tolerance: int = 0,
    n_queries: int | None = None,
    technique: str = "",
    query_percent: int | None = None,
    ref_percent: int | None = None,
) -> EvaluationResult:
    """Mark each record correct iff its match lands in the accepted reference
    interval of its query, then aggregate."""
    if n_refs <= 0:
        raise ValueError("n_refs must be positive")
    n_correct = 0
    for rec in records:
        entry = gt.get(rec.query_index)
        if entry is None:
            raise DataError(f"missing ground-truth entry for query {rec.query_index}")
        rec.correct = rec.matched_ref_index in accepted_refs(entry, tolerance, n_refs)
        n_correct += rec.correct
    return EvaluationResult(
        technique=technique,
        query_percent=query_percent,
        ref_percent=ref_percent,
        n_correct=n_correct,
        n_refs=n_refs,
        n_queries=n_queries if n_queries is not None else len(records),
        records=list(records),
    )


def evaluate_pair(
    queries: DescriptorSet,
    refs: DescriptorSet,
    manifest: DatasetManifest,
    technique: str | None = None,
    query_percent: int | None = None,
    ref_percent: int | None = None,
) -> EvaluationResult:
    """Match every query against the reference set and score correctness."""
    records = match_all(queries, refs)
    return accuracy(
        records,
        manifest.gt_map,
        n_refs=refs.count,
        tolerance=manifest.frame_tolerance,
        n_queries=queries.count,
        technique=technique if technique is not None else queries.technique,
        query_percent=query_percent if query_percent is not None else queries.source_percent,
        ref_percent=ref_percent if ref_percent is not None else refs.source_percent,
    )


def image_entropy(image: np.ndarray) -> float:
    """Shannon entropy of the grayscale intensity histogram, in bits."""
    arr = np.asarray(image)
    if arr.size == 0:
        raise ValueError("empty image")
    gray = to_grayscale(arr) if arr.ndim == 3 else arr.astype(np.uint8, copy=False)
    counts = np.bincount(gray.ravel(), minlength=256)
    p = counts[counts > 0] / gray.size
    return float(-(p * np.log2(p)).sum())


@dataclass
class EntropyReport:
    dataset: str
    percent: int
    filenames: list[str]
    entropies: list[float]

    @property
    def mean(self) -> float:
        return sum(self.entropies) / len(self.entropies)


def average_entropy(
    manifest: DatasetManifest,
    percent: int,
    sweep_root: Path | str,
    workers: int = 1,
) -> EntropyReport:
    """Per-image and mean entropy over the compressed query corpus of one level."""
    directory = corpus_dir(sweep_root, percent, "query")
    if not directory.is_dir():
        raise DataError(f"missing compressed corpus {directory}")
    paths = [directory / (Path(rec.filename).stem + ".jpg") for rec in manifest.queries]
    missing = [p for p in paths if not p.is_file()]
    if missing:
        raise DataError(f"compressed corpus {directory} missing {len(missing)} images (e.g. {missing[0].name})")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entropies = list(pool.map(lambda p: image_entropy(read_image(p)), paths))
    else:
        entropies = [image_entropy(read_image(p)) for p in paths]
    return EntropyReport(
        dataset=manifest.name,
        percent=percent,
        filenames=[p.name for p in paths],
        entropies=entropies,
    )


@dataclass
class DegradationCurve:
    """Accuracy as a function of compression level, uniform protocol."""

    technique: str
    dataset: str
    points: list[tuple[int, EvaluationResult]]


def degradation_curve(
    sets_by_level: Mapping[int, tuple[DescriptorSet, DescriptorSet]],
    manifest: DatasetManifest,
    levels: Sequence[int],
) -> DegradationCurve:
    """One evaluation per level, query and reference compressed alike."""
    levels = list(levels)
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError(f"levels must be strictly increasing, got {levels}")
    points = []
    technique = ""
    for percent in levels:
        if percent not in sets_by_level:
            raise DataError(f"missing descriptor sets for level {percent}")
        qset, rset = sets_by_level[percent]
        result = evaluate_pair(qset, rset, manifest, query_percent=percent, ref_percent=percent)
        technique = result.technique
        points.append((percent, result))
    return DegradationCurve(technique=technique, dataset=manifest.name, points=points)


@dataclass
class NonUniformGrid:
    """Accuracy cells over (query level, reference level) pairs."""

    technique: str
    dataset: str
    cells: dict[tuple[int, int], EvaluationResult]


def nonuniform_grid(
    query_sets: Mapping[int, DescriptorSet],
    ref_sets: Mapping[int, DescriptorSet],
    manifest: DatasetManifest,
    q_levels: Sequence[int],
    r_levels: Sequence[int],
) -> NonUniformGrid:
    """Evaluate every requested (query level, reference level) combination."""
    cells: dict[tuple[int, int], EvaluationResult] = {}
    technique = ""
    for a in q_levels:
        if a not in query_sets:
            raise DataError(f"missing query descriptor set for level {a}")
        for b in r_levels:
            if b not in ref_sets:
                raise DataError(f"missing reference descriptor set for level {b}")
            result = evaluate_pair(
                query_sets[a], ref_sets[b], manifest, query_percent=a, ref_percent=b
            )
            technique = result.technique
            cells[(a, b)] = result
    return NonUniformGrid(technique=technique, dataset=manifest.name, cells=cells)
