"""Query/reference corpus loading with ground-truth correspondence.

A manifest is a JSON document:

    {
      "name": "campus_synth",
      "query_dir": "query",
      "reference_dir": "reference",
      "frame_tolerance": 0,
      "ground_truth": [[q, lo, hi], ...]   # optional
    }

Directories are resolved relative to the manifest file. Frame index is
defined by lexicographic filename order, so enumeration is reproducible
across filesystems. When "ground_truth" is omitted, query i is paired with
reference i (identity pairing).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from PIL import Image, UnidentifiedImageError

from .errors import ManifestError

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg"}


@dataclass(frozen=True)
class GroundTruthEntry:
    """Inclusive range of reference indices accepted as correct for one query."""

    query_index: int
    ref_lo: int
    ref_hi: int

    def __post_init__(self) -> None:
        if self.ref_lo > self.ref_hi:
            raise ManifestError(
                f"empty range for query {self.query_index}: lo={self.ref_lo} > hi={self.ref_hi}"
            )
        if self.ref_lo < 0:
            raise ManifestError(f"negative reference index for query {self.query_index}")


@dataclass(frozen=True)
class ImageRecord:
    index: int
    filename: str
    width: int
    height: int
    raw_bytes: int


@dataclass
class DatasetManifest:
    name: str
    query_dir: Path
    reference_dir: Path
    frame_tolerance: int
    ground_truth: list[GroundTruthEntry]
    queries: list[ImageRecord]
    references: list[ImageRecord]
    identity_gt: bool  # True when ground truth was defaulted to identity pairing

    @property
    def gt_map(self) -> dict[int, GroundTruthEntry]:
        return {e.query_index: e for e in self.ground_truth}


def list_images(directory: Path | str) -> list[ImageRecord]:
    """Enumerate a corpus directory in lexicographic filename order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ManifestError(f"not a directory: {directory}")
    names = sorted(
        p.name for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS
    )
    records = []
    for index, name in enumerate(names):
        path = directory / name
        try:
            with Image.open(path) as img:
                width, height = img.size
        except (UnidentifiedImageError, OSError) as exc:
            raise ManifestError(f"undecodable image {path}: {exc}") from exc
        records.append(ImageRecord(index, name, width, height, path.stat().st_size))
    return records


def load_manifest(path: Path | str) -> DatasetManifest:
    """Load and fully resolve a manifest file, validating its invariants."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}:{exc.lineno}: unparsable manifest: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ManifestError(f"{path}: manifest must be a JSON object")

    for key in ("query_dir", "reference_dir"):
        if key not in doc:
            raise ManifestError(f"{path}: missing required key {key!r}")

    base = path.parent
    query_dir = (base / doc["query_dir"]).resolve()
    reference_dir = (base / doc["reference_dir"]).resolve()
    name = str(doc.get("name", path.stem))

    tolerance = doc.get("frame_tolerance", 0)
    if not isinstance(tolerance, int) or tolerance < 0:
        raise ManifestError(f"{path}: frame_tolerance must be a non-negative integer")

    queries = list_images(query_dir)
    references = list_images(reference_dir)
    if not queries:
        raise ManifestError(f"{path}: query_dir {query_dir} contains no images")
    if not references:
        raise ManifestError(f"{path}: reference_dir {reference_dir} contains no images")

    raw_gt = doc.get("ground_truth")
    if raw_gt is None:
        identity = True
        entries = [
            GroundTruthEntry(i, i, i) for i in range(min(len(queries), len(references)))
        ]
    else:
        identity = False
        if not isinstance(raw_gt, list):
            raise ManifestError(f"{path}: ground_truth must be a list of [q, lo, hi] triples")
        entries = []
        for item in raw_gt:
            if not (isinstance(item, list) and len(item) == 3 and all(isinstance(v, int) for v in item)):
                raise ManifestError(f"{path}: bad ground_truth entry {item!r}, expected [q, lo, hi]")
            q, lo, hi = item
            if not 0 <= q < len(queries):
                raise ManifestError(
                    f"{path}: ground_truth query index {q} out of range (have {len(queries)} queries)"
                )
            if hi >= len(references):
                raise ManifestError(
                    f"{path}: ground_truth reference index {hi} out of range "
                    f"(have {len(references)} references)"
                )
            entries.append(GroundTruthEntry(q, lo, hi))
        seen = set()
        for e in entries:
            if e.query_index in seen:
                raise ManifestError(f"{path}: duplicate ground_truth entry for query {e.query_index}")
            seen.add(e.query_index)

    return DatasetManifest(
        name=name,
        query_dir=query_dir,
        reference_dir=reference_dir,
        frame_tolerance=tolerance,
        ground_truth=entries,
        queries=queries,
        references=references,
        identity_gt=identity,
    )


def accepted_refs(gt: GroundTruthEntry, tolerance: int, n_refs: int) -> range:
    """Reference indices accepted as correct: the ground-truth interval widened
    by the tolerance and clamped to [0, n_refs)."""
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    lo = max(0, gt.ref_lo - tolerance)
    hi = min(n_refs - 1, gt.ref_hi + tolerance)
    return range(lo, hi + 1)


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    message: str
    filename: str | None = None


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    @property
    def empty(self) -> bool:
        return not self.issues


def validate_dataset(manifest: DatasetManifest) -> ValidationReport:
    """Full-decode check of every image plus ground-truth coverage.

    Problems are report entries, not exceptions: undecodable files are
    errors, heterogeneous dimensions and coverage gaps are warnings
    (descriptors resize internally, so mixed dimensions stay usable).
    """
    report = ValidationReport()
    for role, directory, records in (
        ("query", manifest.query_dir, manifest.queries),
        ("reference", manifest.reference_dir, manifest.references),
    ):
        dims = set()
        for rec in records:
            path = directory / rec.filename
            try:
                with Image.open(path) as img:
                    img.load()
            except (UnidentifiedImageError, OSError) as exc:
                report.issues.append(
                    ValidationIssue("error", f"undecodable {role} image: {exc}", rec.filename)
                )
                continue
            dims.add((rec.width, rec.height))
        if len(dims) > 1:
            report.issues.append(
                ValidationIssue(
                    "warning",
                    f"{role} set has heterogeneous dimensions {sorted(dims)}; descriptors will resize",
                )
            )

    covered = {e.query_index for e in manifest.ground_truth}
    missing = [r.index for r in manifest.queries if r.index not in covered]
    if missing:
        kind = "identity pairing has no reference for" if manifest.identity_gt else "no ground-truth entry for"
        report.issues.append(
            ValidationIssue("warning", f"{kind} queries {missing[:10]}{'...' if len(missing) > 10 else ''}")
        )
    return report
