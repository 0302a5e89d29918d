"""Exported files driven through the retrieval harness CLI.

The harness is exercised strictly as an installed command; nothing from it
is imported here.
"""

from __future__ import annotations

import csv
import subprocess
import sys
from pathlib import Path

import pytest

from test_export import make_corpus

FINETUNE_SCRIPT = Path(__file__).resolve().parent.parent / "scripts" / "finetune_toy.py"


def run_harness(*args):
    return subprocess.run(
        [sys.executable, "-m", "vprjpeg.cli", *args],
        capture_output=True, text=True,
    )


@pytest.fixture(scope="module")
def exported(tmp_path_factory):
    corpus = make_corpus(tmp_path_factory.mktemp("corpus"), count=5, seed=12)
    out = tmp_path_factory.mktemp("out") / "alexnet.vprd"
    rc = subprocess.run(
        [sys.executable, "-m", "vprd_exporter.cli",
         "--corpus", str(corpus), "--layer", "fc6", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert rc.returncode == 0, rc.stderr
    return out


def test_passes_harness_loader_and_self_matches(exported, tmp_path):
    matches = tmp_path / "matches.csv"
    proc = run_harness("match", "--queries", str(exported), "--refs", str(exported),
                       "--out", str(matches))
    assert proc.returncode == 0, proc.stderr

    with matches.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 5
    for row in rows:
        assert row["matched_ref_index"] == row["query_index"]
        assert float(row["score"]) == pytest.approx(1.0, abs=1e-6)


def test_finetuned_weights_round_trip(tmp_path):
    corpus = make_corpus(tmp_path / "corpus", count=3, seed=15)
    weights = tmp_path / "tuned.pt"
    proc = subprocess.run(
        [sys.executable, str(FINETUNE_SCRIPT),
         "--corpus", str(corpus), "--out", str(weights),
         "--steps", "2", "--batch", "2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert weights.is_file()

    out = tmp_path / "tuned.vprd"
    rc = subprocess.run(
        [sys.executable, "-m", "vprd_exporter.cli",
         "--corpus", str(corpus), "--out", str(out), "--weights", str(weights)],
        capture_output=True, text=True,
    )
    assert rc.returncode == 0, rc.stderr

    matches = tmp_path / "matches.csv"
    proc = run_harness("match", "--queries", str(out), "--refs", str(out),
                       "--out", str(matches))
    assert proc.returncode == 0, proc.stderr
    with matches.open() as fh:
        rows = list(csv.DictReader(fh))
    assert [r["matched_ref_index"] for r in rows] == [r["query_index"] for r in rows]
