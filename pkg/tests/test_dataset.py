from __future__ import annotations

import json

import pytest
from PIL import Image

from vprjpeg.dataset import (
    GroundTruthEntry,
    accepted_refs,
    list_images,
    load_manifest,
    validate_dataset,
)
from vprjpeg.errors import ManifestError


def _write_images(directory, names, size=(8, 6), color=(100, 120, 140)):
    directory.mkdir(parents=True, exist_ok=True)
    for name in names:
        Image.new("RGB", size, color).save(directory / name)


def _write_manifest(root, doc):
    path = root / "manifest.json"
    path.write_text(json.dumps(doc))
    return path


def test_identity_ground_truth_default(tmp_path):
    _write_images(tmp_path / "q", [f"{i}.png" for i in range(4)])
    _write_images(tmp_path / "r", [f"{i}.png" for i in range(4)])
    path = _write_manifest(tmp_path, {"name": "d", "query_dir": "q", "reference_dir": "r"})
    m = load_manifest(path)
    assert m.identity_gt
    assert m.frame_tolerance == 0
    assert [(e.query_index, e.ref_lo, e.ref_hi) for e in m.ground_truth] == [
        (i, i, i) for i in range(4)
    ]


def test_explicit_ground_truth_range(tmp_path):
    _write_images(tmp_path / "q", [f"{i}.png" for i in range(6)])
    _write_images(tmp_path / "r", [f"{i}.png" for i in range(8)])
    path = _write_manifest(
        tmp_path,
        {"query_dir": "q", "reference_dir": "r", "ground_truth": [[5, 4, 6]]},
    )
    m = load_manifest(path)
    assert not m.identity_gt
    entry = m.gt_map[5]
    assert list(accepted_refs(entry, 0, len(m.references))) == [4, 5, 6]


def test_empty_range_rejected():
    with pytest.raises(ManifestError, match="empty range"):
        GroundTruthEntry(5, 7, 6)


def test_accepted_refs_tolerance_and_clamping():
    assert list(accepted_refs(GroundTruthEntry(0, 10, 10), 0, 100)) == [10]
    assert list(accepted_refs(GroundTruthEntry(0, 10, 10), 2, 100)) == [8, 9, 10, 11, 12]
    assert list(accepted_refs(GroundTruthEntry(0, 0, 0), 3, 100)) == [0, 1, 2, 3]
    assert list(accepted_refs(GroundTruthEntry(0, 99, 99), 3, 100)) == [96, 97, 98, 99]


def test_accepted_refs_always_nonempty_interval():
    for lo, hi, tol, n in [(0, 0, 0, 1), (5, 9, 2, 10), (0, 0, 50, 3)]:
        r = accepted_refs(GroundTruthEntry(0, lo, hi), tol, n)
        assert len(r) >= 1
        assert r.start >= 0 and r.stop <= n


def test_lexicographic_enumeration_is_deterministic(tmp_path):
    names = ["b.png", "a.png", "c.jpg", "0.png"]
    _write_images(tmp_path / "imgs", names)
    first = list_images(tmp_path / "imgs")
    second = list_images(tmp_path / "imgs")
    assert [(r.index, r.filename) for r in first] == [(r.index, r.filename) for r in second]
    assert [r.filename for r in first] == sorted(names)
    assert [r.index for r in first] == [0, 1, 2, 3]


def test_image_records_carry_dimensions(tmp_path):
    _write_images(tmp_path / "imgs", ["a.png"], size=(13, 7))
    rec = list_images(tmp_path / "imgs")[0]
    assert (rec.width, rec.height) == (13, 7)
    assert rec.raw_bytes > 0


def test_gt_index_out_of_range(tmp_path):
    _write_images(tmp_path / "q", ["0.png"])
    _write_images(tmp_path / "r", ["0.png"])
    path = _write_manifest(
        tmp_path, {"query_dir": "q", "reference_dir": "r", "ground_truth": [[3, 0, 0]]}
    )
    with pytest.raises(ManifestError, match="out of range"):
        load_manifest(path)
    path = _write_manifest(
        tmp_path, {"query_dir": "q", "reference_dir": "r", "ground_truth": [[0, 0, 5]]}
    )
    with pytest.raises(ManifestError, match="out of range"):
        load_manifest(path)


def test_missing_directory_reported_with_context(tmp_path):
    _write_images(tmp_path / "q", ["0.png"])
    path = _write_manifest(tmp_path, {"query_dir": "q", "reference_dir": "nowhere"})
    with pytest.raises(ManifestError, match="nowhere"):
        load_manifest(path)


def test_unparsable_manifest_has_line_context(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text('{"query_dir": "q",\n  broken\n}')
    with pytest.raises(ManifestError, match=r"manifest\.json:2"):
        load_manifest(path)


def test_validate_clean_dataset_empty_report(tmp_path):
    _write_images(tmp_path / "q", ["0.png", "1.png"])
    _write_images(tmp_path / "r", ["0.png", "1.png"])
    path = _write_manifest(tmp_path, {"query_dir": "q", "reference_dir": "r"})
    report = validate_dataset(load_manifest(path))
    assert report.empty and report.ok


def test_validate_names_corrupt_file(tmp_path):
    _write_images(tmp_path / "q", ["0.png", "1.png"])
    _write_images(tmp_path / "r", ["0.png", "1.png"])
    # Valid PNG header followed by garbage: survives the header probe,
    # fails the full decode.
    good = (tmp_path / "q" / "0.png").read_bytes()
    (tmp_path / "q" / "1.png").write_bytes(good[:45])
    path = _write_manifest(tmp_path, {"query_dir": "q", "reference_dir": "r"})
    report = validate_dataset(load_manifest(path))
    assert not report.ok
    assert any(i.filename == "1.png" and i.severity == "error" for i in report.issues)


def test_validate_warns_on_coverage_gap(tmp_path):
    _write_images(tmp_path / "q", ["0.png", "1.png"])
    _write_images(tmp_path / "r", ["0.png", "1.png"])
    path = _write_manifest(
        tmp_path, {"query_dir": "q", "reference_dir": "r", "ground_truth": [[0, 0, 0]]}
    )
    report = validate_dataset(load_manifest(path))
    assert report.ok  # warnings only
    assert any("1" in i.message and i.severity == "warning" for i in report.issues)


def test_validate_warns_on_mixed_dimensions(tmp_path):
    _write_images(tmp_path / "q", ["0.png"], size=(8, 6))
    _write_images(tmp_path / "q", ["1.png"], size=(16, 12))
    _write_images(tmp_path / "r", ["0.png", "1.png"])
    path = _write_manifest(tmp_path, {"query_dir": "q", "reference_dir": "r"})
    report = validate_dataset(load_manifest(path))
    assert report.ok
    assert any("heterogeneous" in i.message for i in report.issues)
