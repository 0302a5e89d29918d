from __future__ import annotations

import json

import numpy as np
import pytest

from vprjpeg import reports
from vprjpeg.bandwidth import ParetoPoint, TransmissionPlan
from vprjpeg.jpeg_codec import CompressionSweepResult, ImageSizeEntry
from vprjpeg.matcher import MatchRecord
from vprjpeg.metrics import DegradationCurve, EntropyReport, EvaluationResult, NonUniformGrid


def _sweep_result():
    entries = [
        ImageSizeEntry(0, "query", 0, "a.png", 1000),
        ImageSizeEntry(0, "reference", 0, "a.png", 1100),
        ImageSizeEntry(97, "query", 0, "a.png", 50),
        ImageSizeEntry(97, "reference", 0, "a.png", 60),
    ]
    return CompressionSweepResult(dataset="d", levels=(0, 97), entries=entries)


def test_sizes_csv_roundtrip(tmp_path):
    path = tmp_path / "sizes.csv"
    reports.write_sizes_csv(_sweep_result(), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "dataset,percent,role,image_index,filename,bytes"
    assert len(lines) == 5
    assert reports.load_sweep_totals(path) == {0: 2100, 97: 110}
    assert reports.load_sweep_counts(path) == {0: 2, 97: 2}


def test_matches_csv_has_nine_decimals(tmp_path):
    path = tmp_path / "matches.csv"
    reports.write_matches_csv([MatchRecord(0, 3, 1 / 3)], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "query_index,matched_ref_index,score"
    assert lines[1] == "0,3,0.333333333"


def _result(percent, nc=3, nr=4, nq=4):
    return EvaluationResult("hog", percent, percent, nc, nr, nq)


def test_curve_csv_roundtrip(tmp_path):
    curve = DegradationCurve(
        "hog", "d", [(0, _result(0, 4)), (97, _result(97, 1))]
    )
    path = tmp_path / "curve.csv"
    reports.write_curve_csv(curve, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("technique,dataset,q_level,r_level")
    assert lines[1] == "hog,d,0,0,4,4,4,1.000000000,1.000000000"

    loaded = reports.load_curve_csv(path)
    assert loaded.technique == "hog"
    assert loaded.dataset == "d"
    assert [(p, r.n_correct, r.n_refs) for p, r in loaded.points] == [(0, 4, 4), (97, 1, 4)]


def test_load_curve_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="unexpected header"):
        reports.load_curve_csv(path)


def test_source_level_written_as_word(tmp_path):
    res = EvaluationResult("hog", None, None, 2, 2, 2)
    row = reports.result_row(res, "d")
    assert row[2] == "source" and row[3] == "source"


def _cell(q, r):
    return EvaluationResult("hog", q, r, 3, 4, 4)


def test_grid_csv_sorted_cells(tmp_path):
    grid = NonUniformGrid(
        "hog", "d",
        {(97, 0): _cell(97, 0), (0, 0): _cell(0, 0), (0, 97): _cell(0, 97), (97, 97): _cell(97, 97)},
    )
    path = tmp_path / "grid.csv"
    reports.write_grid_csv(grid, path)
    rows = path.read_text().splitlines()[1:]
    cells = [tuple(r.split(",")[2:4]) for r in rows]
    assert cells == [("0", "0"), ("0", "97"), ("97", "0"), ("97", "97")]


def test_entropy_csv_and_json(tmp_path):
    rep = EntropyReport("d", 50, ["a.jpg", "b.jpg"], [7.25, 6.75])
    path = tmp_path / "entropy.csv"
    reports.write_entropy_csv([rep], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "dataset,percent,image_index,filename,entropy_bits"
    assert lines[1] == "d,50,0,a.jpg,7.250000000"

    doc = reports.entropy_to_json([rep])
    assert doc["levels"][0]["mean_entropy_bits"] == 7.0


def test_pareto_csv(tmp_path):
    points = [ParetoPoint(0, 100.0, 1.0, True), ParetoPoint(97, 10.0, 0.5, False)]
    path = tmp_path / "pareto.csv"
    reports.write_pareto_csv(points, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "percent,total_bytes,accuracy,pareto_optimal"
    assert lines[1] == "0,100,1.000000000,1"
    assert lines[2] == "97,10,0.500000000,0"


def test_plans_to_json():
    bare = reports.plans_to_json([TransmissionPlan(0, 100, 2.0, 5.0, None)])
    assert bare == [
        {"percent": 0, "total_bytes": 100, "transfer_seconds": 2.0, "frames_per_second": 5.0}
    ]
    with_curve = reports.plans_to_json([TransmissionPlan(0, 100, 2.0, 5.0, 0.75)])
    assert with_curve[0]["accuracy"] == 0.75


def test_merge_results_csvs(tmp_path):
    curve = DegradationCurve("hog", "d", [(0, _result(0))])
    a = reports.write_curve_csv(curve, tmp_path / "a.csv")
    b = reports.write_curve_csv(curve, tmp_path / "b.csv")
    out = reports.merge_results_csvs([a, b], tmp_path / "merged.csv")
    lines = out.read_text().splitlines()
    assert len(lines) == 3  # header + one row per input


def test_merge_rejects_foreign_csv(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        reports.merge_results_csvs([bad], tmp_path / "out.csv")


def test_write_json_deterministic(tmp_path):
    doc = {"b": 2, "a": [1, 2, 3]}
    p1 = reports.write_json(doc, tmp_path / "one.json")
    p2 = reports.write_json(doc, tmp_path / "two.json")
    assert p1.read_bytes() == p2.read_bytes()
    assert json.loads(p1.read_text()) == doc


def test_csv_writes_are_byte_identical(tmp_path):
    a = reports.write_sizes_csv(_sweep_result(), tmp_path / "a.csv")
    b = reports.write_sizes_csv(_sweep_result(), tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()


def test_sidecar_contents(tmp_path):
    artifact = tmp_path / "out.csv"
    artifact.write_text("data\n")
    inp = tmp_path / "in.json"
    inp.write_text("{}")
    sidecar = reports.write_sidecar(artifact, "compress", {"levels": [0]}, [inp])
    assert sidecar == tmp_path / "out.csv.meta.json"
    doc = json.loads(sidecar.read_text())
    assert doc["tool"] == "vprjpeg"
    assert doc["command"] == "compress"
    assert doc["params"] == {"levels": [0]}
    assert "encoder" in doc and doc["encoder"].startswith("Pillow")
    assert "created" in doc
    digest = list(doc["inputs"].values())[0]
    assert len(digest) == 64  # sha256 hex


def test_sidecar_digest_stable_for_dirs(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    (d / "a.txt").write_text("one")
    (d / "b.txt").write_text("two")
    artifact = tmp_path / "x.csv"
    artifact.write_text("x")
    s1 = json.loads(reports.write_sidecar(artifact, "c", {}, [d]).read_text())
    s2 = json.loads(reports.write_sidecar(artifact, "c", {}, [d]).read_text())
    assert s1["inputs"] == s2["inputs"]
