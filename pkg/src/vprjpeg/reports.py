"""CSV/JSON report emitters and run-metadata sidecars.

All CSVs are UTF-8, comma-separated, header row mandatory, '\n' line
endings. Scores, accuracies, and entropies are written with 9 fixed decimal
places so artifact files are byte-identical across runs and worker counts.
Sidecars carry the only timestamps; they sit next to each artifact as
<artifact>.meta.json.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__
from .bandwidth import ParetoPoint, TransmissionPlan
from .jpeg_codec import ENCODER_VERSION, CompressionSweepResult
from .matcher import MatchRecord
from .metrics import DegradationCurve, EntropyReport, EvaluationResult, NonUniformGrid

SIZES_HEADER = ["dataset", "percent", "role", "image_index", "filename", "bytes"]
MATCHES_HEADER = ["query_index", "matched_ref_index", "score"]
RESULTS_HEADER = [
    "technique", "dataset", "q_level", "r_level",
    "N_c", "N_r", "N_q", "accuracy", "accuracy_per_query",
]
ENTROPY_HEADER = ["dataset", "percent", "image_index", "filename", "entropy_bits"]
PARETO_HEADER = ["percent", "total_bytes", "accuracy", "pareto_optimal"]


def _write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _fixed(x: float) -> str:
    return f"{x:.9f}"


def write_sizes_csv(result: CompressionSweepResult, path: Path | str) -> Path:
    rows = [
        (result.dataset, e.percent, e.role, e.image_index, e.filename, e.bytes)
        for e in result.entries
    ]
    return _write_csv(path, SIZES_HEADER, rows)


def load_sweep_totals(path: Path | str) -> dict[int, int]:
    """Per-level byte totals from a sizes CSV."""
    totals: dict[int, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            percent = int(row["percent"])
            totals[percent] = totals.get(percent, 0) + int(row["bytes"])
    if not totals:
        raise ValueError(f"no rows in size sweep {path}")
    return totals


def load_sweep_counts(path: Path | str) -> dict[int, int]:
    """Per-level image counts from a sizes CSV."""
    counts: dict[int, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            percent = int(row["percent"])
            counts[percent] = counts.get(percent, 0) + 1
    return counts


def write_matches_csv(records: Sequence[MatchRecord], path: Path | str) -> Path:
    rows = [(r.query_index, r.matched_ref_index, _fixed(r.score)) for r in records]
    return _write_csv(path, MATCHES_HEADER, rows)


def result_row(result: EvaluationResult, dataset: str) -> list:
    def level(p):
        return p if p is not None else "source"

    return [
        result.technique, dataset, level(result.query_percent), level(result.ref_percent),
        result.n_correct, result.n_refs, result.n_queries,
        _fixed(result.accuracy), _fixed(result.accuracy_per_query),
    ]


def write_curve_csv(curve: DegradationCurve, path: Path | str) -> Path:
    rows = [result_row(res, curve.dataset) for _, res in curve.points]
    return _write_csv(path, RESULTS_HEADER, rows)


def write_grid_csv(grid: NonUniformGrid, path: Path | str) -> Path:
    rows = [result_row(grid.cells[key], grid.dataset) for key in sorted(grid.cells)]
    return _write_csv(path, RESULTS_HEADER, rows)


def load_curve_csv(path: Path | str) -> DegradationCurve:
    """Rebuild a degradation curve from its CSV. Match records are not
    stored in the table, so the returned results carry counts only.
    Keeps uniform rows (q_level == r_level) and ignores the rest.
    """
    points: list[tuple[int, EvaluationResult]] = []
    technique = ""
    dataset = ""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULTS_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            if row["q_level"] != row["r_level"] or row["q_level"] == "source":
                continue
            percent = int(row["q_level"])
            technique = row["technique"]
            dataset = row["dataset"]
            points.append((percent, EvaluationResult(
                technique=technique,
                query_percent=percent,
                ref_percent=percent,
                n_correct=int(row["N_c"]),
                n_refs=int(row["N_r"]),
                n_queries=int(row["N_q"]),
            )))
    if not points:
        raise ValueError(f"no uniform-level rows in {path}")
    points.sort(key=lambda pair: pair[0])
    return DegradationCurve(technique=technique, dataset=dataset, points=points)


def curve_to_json(curve: DegradationCurve) -> dict:
    return {
        "technique": curve.technique,
        "dataset": curve.dataset,
        "points": [
            {
                "percent": p,
                "N_c": res.n_correct,
                "N_r": res.n_refs,
                "N_q": res.n_queries,
                "accuracy": res.accuracy,
                "accuracy_per_query": res.accuracy_per_query,
            }
            for p, res in curve.points
        ],
    }


def grid_to_json(grid: NonUniformGrid) -> dict:
    return {
        "technique": grid.technique,
        "dataset": grid.dataset,
        "cells": [
            {
                "q_level": a,
                "r_level": b,
                "N_c": res.n_correct,
                "N_r": res.n_refs,
                "N_q": res.n_queries,
                "accuracy": res.accuracy,
                "accuracy_per_query": res.accuracy_per_query,
            }
            for (a, b), res in sorted(grid.cells.items())
        ],
    }


def write_entropy_csv(reports: Sequence[EntropyReport], path: Path | str) -> Path:
    rows = []
    for rep in reports:
        for index, (name, bits) in enumerate(zip(rep.filenames, rep.entropies)):
            rows.append((rep.dataset, rep.percent, index, name, _fixed(bits)))
    return _write_csv(path, ENTROPY_HEADER, rows)


def entropy_to_json(reports: Sequence[EntropyReport]) -> dict:
    return {
        "levels": [
            {"dataset": r.dataset, "percent": r.percent, "mean_entropy_bits": r.mean}
            for r in reports
        ]
    }


def write_pareto_csv(points: Sequence[ParetoPoint], path: Path | str) -> Path:
    rows = [
        (p.percent, int(p.total_bytes), _fixed(p.accuracy), int(p.optimal))
        for p in points
    ]
    return _write_csv(path, PARETO_HEADER, rows)


def plans_to_json(plans: Sequence[TransmissionPlan]) -> list[dict]:
    out = []
    for plan in plans:
        entry = {
            "percent": plan.percent,
            "total_bytes": plan.total_bytes,
            "transfer_seconds": plan.transfer_seconds,
            "frames_per_second": plan.frames_per_second,
        }
        if plan.accuracy is not None:
            entry["accuracy"] = plan.accuracy
        out.append(entry)
    return out


def write_json(payload, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def merge_results_csvs(inputs: Sequence[Path | str], out: Path | str) -> Path:
    """Concatenate long-format result CSVs into one table (headers must agree)."""
    rows = []
    for src in inputs:
        with open(src, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != RESULTS_HEADER:
                raise ValueError(f"{src}: unexpected header {header}")
            rows.extend(reader)
    return _write_csv(out, RESULTS_HEADER, rows)


def _digest_path(path: Path) -> str:
    h = hashlib.sha256()
    if path.is_dir():
        for child in sorted(path.rglob("*")):
            if child.is_file():
                h.update(child.relative_to(path).as_posix().encode())
                h.update(child.read_bytes())
    else:
        h.update(path.read_bytes())
    return h.hexdigest()


def write_sidecar(
    artifact: Path | str,
    command: str,
    params: Mapping,
    inputs: Sequence[Path | str] = (),
) -> Path:
    """Run-metadata sidecar for one artifact file: tool and encoder versions,
    parameters, and input digests. The timestamp lives only here."""
    artifact = Path(artifact)
    meta = {
        "tool": "vprjpeg",
        "version": __version__,
        "encoder": ENCODER_VERSION,
        "python": platform.python_version(),
        "command": command,
        "created": datetime.now(timezone.utc).isoformat(),
        "params": dict(params),
        "inputs": {str(p): _digest_path(Path(p)) for p in inputs},
        "artifact": artifact.name,
    }
    side = artifact.with_name(artifact.name + ".meta.json")
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return side
