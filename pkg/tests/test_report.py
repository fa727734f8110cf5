from __future__ import annotations

import csv
import json

import pytest

from tuba.cli import run_cli
from tuba.metrics import Kind, Linkage, MetricKind
from tuba.report import write_report

import io


def test_write_report_produces_all_artifacts(robot, tmp_path):
    out = tmp_path / "report"
    paths = write_report(robot, target=Kind.HYPOTHESES,
                         metric=MetricKind.EUCLIDEAN,
                         linkage=Linkage.COMPLETE, weights=(0.9, 0.1), k=3,
                         out_dir=out)
    names = {p.name for p in paths}
    assert names == {"dendrogram.json", "partition.json", "dendrogram.svg",
                     "dendrogram.png", "merges.csv", "categories.csv"}
    assert all(p.stat().st_size > 0 for p in paths)

    # PNG magic bytes confirm a real figure was rendered.
    assert (out / "dendrogram.png").read_bytes()[:8] == \
        b"\x89PNG\r\n\x1a\n"

    with (out / "categories.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    member_sets = {frozenset(r["members"].split("|")) for r in rows}
    assert frozenset({"Office", "Restroom", "Class"}) in member_sets
    assert all(float(r["max_span"]) >= 0 for r in rows)

    with (out / "merges.csv").open() as fh:
        merges = list(csv.DictReader(fh))
    assert len(merges) == 5
    heights = [float(r["height"]) for r in merges]
    assert heights == sorted(heights)

    doc = json.loads((out / "partition.json").read_text())
    assert doc["kind"] == "hypotheses"


def test_report_cli_lists_written_files(robot, tmp_path):
    model_path = tmp_path / "robot.json"
    from tuba.fixtures import fixture_text
    model_path.write_text(fixture_text("robot.json"), "utf-8")
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(["report", "--model", str(model_path),
                    "--target", "hypotheses", "--metric", "euclidean",
                    "--linkage", "complete", "--k", "4",
                    "--out-dir", str(tmp_path / "out")],
                   stdout=out, stderr=err)
    assert code == 0, err.getvalue()
    written = [json.loads(line)["wrote"] for line in
               out.getvalue().strip().split("\n")]
    assert len(written) == 6
    assert any(w.endswith("dendrogram.png") for w in written)


def test_report_with_tolerance(robot, tmp_path):
    paths = write_report(robot, target=Kind.HYPOTHESES,
                         metric=MetricKind.CHEBYSHEV,
                         linkage=Linkage.COMPLETE, tolerance=0.3,
                         out_dir=tmp_path / "tol")
    doc = json.loads((tmp_path / "tol" / "partition.json").read_text())
    assert doc["cutoff"] == 0.3
    for cat in doc["categories"]:
        assert cat["max_span"] <= 0.3 + 1e-9
