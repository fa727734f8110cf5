from __future__ import annotations

import io
import json

import pytest

from tuba import workflows
from tuba.cli import run_cli
from tuba.clustering import parse_dendrogram
from tuba.decisions import Mode, Rule
from tuba.fixtures import fixture_text
from tuba.metrics import Category, Kind, Linkage, MetricKind
from tuba.modelfile import parse_model


@pytest.fixture()
def robot_file(tmp_path):
    path = tmp_path / "robot.json"
    path.write_text(fixture_text("robot.json"), "utf-8")
    return str(path)


@pytest.fixture()
def uniform_file(tmp_path):
    path = tmp_path / "uniform.json"
    path.write_text(fixture_text("robot_uniform_dist.json"), "utf-8")
    return str(path)


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


class TestValidate:
    def test_valid_model_prints_canonical(self, robot_file):
        code, out, err = cli("validate", "--model", robot_file)
        assert code == 0
        model = parse_model(fixture_text("robot.json"))
        assert out == workflows.model_output(model) + "\n"
        assert err == ""

    def test_invalid_model_single_line_json_error(self, tmp_path):
        doc = json.loads(fixture_text("robot.json"))
        del doc["outcomes"]["Gather|Class"]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc), "utf-8")
        code, out, err = cli("validate", "--model", str(bad))
        assert code == 1
        assert out == ""
        lines = err.strip().split("\n")
        assert len(lines) == 1
        payload = json.loads(lines[0])
        assert payload["error"] == "ModelFormatError"
        assert payload["violations"]

    def test_out_of_range_warns_on_stderr(self, tmp_path):
        doc = json.loads(fixture_text("robot.json"))
        doc["outcomes"]["Gather|Class"] = [1.5, 0.5]
        warned = tmp_path / "warn.json"
        warned.write_text(json.dumps(doc), "utf-8")
        code, out, err = cli("validate", "--model", str(warned))
        assert code == 0
        assert json.loads(err.strip())["warning"]

    def test_missing_file_is_data_error(self):
        code, out, err = cli("validate", "--model", "/nonexistent.json")
        assert code == 1
        assert json.loads(err.strip())["error"] == "FileNotFoundError"


class TestUsageErrors:
    def test_unknown_subcommand(self):
        code, out, err = cli("frobnicate")
        assert code == 2
        assert json.loads(err.strip())["error"] == "usage"

    def test_missing_required_flag(self):
        code, out, err = cli("cluster", "--target", "hypotheses")
        assert code == 2
        assert json.loads(err.strip())["error"] == "usage"

    def test_bad_weights(self, robot_file):
        code, out, err = cli("cluster", "--model", robot_file, "--target",
                             "hypotheses", "--metric", "euclidean",
                             "--linkage", "complete", "--weights", "a,b")
        assert code == 2


class TestCluster:
    def test_thin_shell_byte_parity(self, robot_file):
        code, out, _ = cli("cluster", "--model", robot_file, "--target",
                           "hypotheses", "--metric", "euclidean",
                           "--linkage", "complete")
        assert code == 0
        model = parse_model(fixture_text("robot.json"))
        direct = workflows.cluster(model, Kind.HYPOTHESES,
                                   MetricKind.EUCLIDEAN, Linkage.COMPLETE)
        assert out == workflows.dendrogram_output(direct) + "\n"

    def test_weights_flag(self, robot_file):
        code, out, _ = cli("cluster", "--model", robot_file, "--target",
                           "hypotheses", "--metric", "euclidean",
                           "--linkage", "complete", "--weights", "0.9,0.1")
        d = parse_dendrogram(out)
        assert d.merges[0].height == pytest.approx(0.23021728866, abs=1e-9)

    def test_text_and_svg_outputs(self, robot_file):
        for fmt, marker in (("text", "["), ("svg", "<svg")):
            code, out, _ = cli("cluster", "--model", robot_file, "--target",
                               "hypotheses", "--metric", "euclidean",
                               "--linkage", "complete", "--out", fmt)
            assert code == 0
            assert marker in out

    def test_weighted_metric_needs_dist(self, robot_file):
        code, _, err = cli("cluster", "--model", robot_file, "--target",
                           "actions", "--metric", "weighted",
                           "--linkage", "complete")
        assert code == 1
        assert json.loads(err.strip())["error"] == "MissingDistributionError"

    def test_weighted_metric_on_hypotheses_rejected(self, robot_file,
                                                    uniform_file):
        code, _, err = cli("cluster", "--model", robot_file, "--target",
                           "hypotheses", "--metric", "weighted",
                           "--linkage", "complete", "--dist", uniform_file)
        assert code == 1
        assert json.loads(err.strip())["error"] == "UnsupportedMetricError"

    def test_subset_flags_project(self, robot_file):
        code, out, _ = cli("cluster", "--model", robot_file, "--target",
                           "hypotheses", "--metric", "euclidean",
                           "--linkage", "complete",
                           "--hypotheses", "Office,Class,Hallway")
        d = parse_dendrogram(out)
        assert d.leaves == ("Office", "Class", "Hallway")


class TestCutAndSpan:
    def cluster_to_file(self, robot_file, tmp_path, *extra):
        code, out, _ = cli("cluster", "--model", robot_file, "--target",
                           "hypotheses", "--metric", "euclidean",
                           "--linkage", "complete", *extra)
        assert code == 0
        path = tmp_path / "dendro.json"
        path.write_text(out, "utf-8")
        return str(path)

    def test_cut_k4_isolates_hallway_office_class(self, robot_file, tmp_path):
        dendro = self.cluster_to_file(robot_file, tmp_path,
                                      "--weights", "0.1,0.9")
        code, out, _ = cli("cut", "--model", robot_file, "--dendrogram",
                           dendro, "--k", "4", "--weights", "0.1,0.9")
        assert code == 0
        doc = json.loads(out)
        members = [set(c["members"]) for c in doc["categories"]]
        assert {"Hallway", "Office", "Class"} in members
        assert doc["kind"] == "hypotheses"
        assert all("max_span" in c for c in doc["categories"])

    def test_cut_k3_flipped_weights(self, robot_file, tmp_path):
        dendro = self.cluster_to_file(robot_file, tmp_path,
                                      "--weights", "0.9,0.1")
        code, out, _ = cli("cut", "--model", robot_file, "--dendrogram",
                           dendro, "--k", "3", "--weights", "0.9,0.1")
        doc = json.loads(out)
        groups = {frozenset(c["members"]) for c in doc["categories"]}
        assert groups == {
            frozenset({"Office", "Restroom", "Class"}),
            frozenset({"Stairwell", "Hallway"}),
            frozenset({"Closet"}),
        }

    def test_cut_requires_exactly_one_selector(self, robot_file, tmp_path):
        dendro = self.cluster_to_file(robot_file, tmp_path)
        code, _, err = cli("cut", "--model", robot_file, "--dendrogram",
                           dendro, "--k", "3", "--tolerance", "0.4")
        assert code == 2

    def test_cut_leaf_mismatch_detected(self, robot_file, tmp_path):
        dendro = self.cluster_to_file(robot_file, tmp_path,
                                      "--hypotheses", "Office,Class,Hallway")
        code, _, err = cli("cut", "--model", robot_file, "--dendrogram",
                           dendro, "--k", "2")
        assert code == 1
        assert "subset" in json.loads(err.strip())["message"]

    def test_span_hypothesis_category(self, robot_file):
        code, out, _ = cli("span", "--model", robot_file, "--category",
                           "Hallway,Closet")
        assert code == 0
        doc = json.loads(out)
        assert doc["kind"] == "hypotheses"
        assert doc["max_span"] == pytest.approx(0.62, abs=1e-9)

    def test_span_action_category_inferred(self, robot_file):
        code, out, _ = cli("span", "--model", robot_file, "--category",
                           "Meander/Scan,Gather")
        doc = json.loads(out)
        assert doc["kind"] == "actions"
        assert set(doc["per_axis"]) == {
            "Hallway", "Closet", "Office", "Stairwell", "Restroom", "Class"}

    def test_span_unknown_member(self, robot_file):
        code, _, err = cli("span", "--model", robot_file, "--category",
                           "Atrium,Closet")
        assert code == 1


class TestDecide:
    def test_base_level_decide(self, robot_file, uniform_file):
        code, out, _ = cli("decide", "--model", robot_file, "--dist",
                           uniform_file)
        assert code == 0
        doc = json.loads(out)
        assert doc["rule"] == "eu"
        # Row means at (0.1, 0.9): Query Assist 3.56/6 beats the rest.
        assert doc["chosen"] == "Query Assist"

    def test_singleton_partition_matches_base(self, robot_file, uniform_file,
                                              tmp_path):
        singles = {
            "kind": "hypotheses",
            "categories": [{"members": [h]} for h in
                           ("Hallway", "Closet", "Office", "Stairwell",
                            "Restroom", "Class")],
        }
        part = tmp_path / "singles.json"
        part.write_text(json.dumps(singles), "utf-8")
        base_code, base_out, _ = cli("decide", "--model", robot_file,
                                     "--dist", uniform_file)
        code, out, _ = cli("decide", "--model", robot_file, "--dist",
                           uniform_file, "--partition", str(part),
                           "--mode", "conditional")
        assert code == 0
        assert json.loads(out)["chosen"] == json.loads(base_out)["chosen"]

    def test_minimax_reports_fallback(self, robot_file, uniform_file,
                                      tmp_path):
        whole = {"kind": "hypotheses", "categories": [{"members": [
            "Hallway", "Closet", "Office", "Stairwell", "Restroom", "Class"]}]}
        part = tmp_path / "whole.json"
        part.write_text(json.dumps(whole), "utf-8")
        code, out, _ = cli("decide", "--model", robot_file, "--dist",
                           uniform_file, "--partition", str(part),
                           "--rule", "minimax")
        doc = json.loads(out)
        assert doc["rule"] == "minimax"
        assert doc["chosen"] is None
        assert doc["dominated"] is False
        assert doc["fallback"]["rule"] == "eu"
        assert doc["intervals"]

    def test_action_partition_eu(self, robot_file, uniform_file, tmp_path):
        part = tmp_path / "acts.json"
        part.write_text(json.dumps({
            "kind": "actions",
            "categories": [
                {"members": ["Charge/Scan", "Gather"]},
                {"members": ["Query Assist", "Meander/Scan"]},
            ]}), "utf-8")
        code, out, _ = cli("decide", "--model", robot_file, "--dist",
                           uniform_file, "--partition", str(part))
        doc = json.loads(out)
        assert set(doc["scores"]) == {"Charge/Scan|Gather",
                                      "Query Assist|Meander/Scan"}

    def test_thin_shell_parity(self, robot_file, uniform_file):
        code, out, _ = cli("decide", "--model", robot_file, "--dist",
                           uniform_file)
        model = parse_model(fixture_text("robot.json"))
        matrix = workflows.build_matrix(model)
        from tuba.fixtures import robot_uniform_dist
        report = workflows.decide(matrix, robot_uniform_dist())
        assert out == workflows.report_output(report) + "\n"


class TestServe:
    def test_port_default_comes_from_env(self, monkeypatch):
        from tuba.cli import build_parser
        monkeypatch.setenv("TUBA_PORT", "4999")
        args = build_parser().parse_args(["serve"])
        assert args.port == 4999

    def test_serve_subprocess_answers_requests(self, robot_file):
        import socket
        import subprocess
        import sys
        import time
        import urllib.request

        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        proc = subprocess.Popen(
            [sys.executable, "-m", "tuba.cli", "serve", "--port", str(port)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE)
        try:
            deadline = time.time() + 10
            body = json.dumps(json.loads(
                fixture_text("robot.json"))).encode()
            req = urllib.request.Request(
                f"http://127.0.0.1:{port}/models", data=body,
                headers={"Content-Type": "application/json"}, method="POST")
            while True:
                try:
                    with urllib.request.urlopen(req, timeout=1) as resp:
                        assert json.loads(resp.read())["id"]
                    break
                except OSError:
                    if time.time() > deadline:
                        raise
                    time.sleep(0.05)
        finally:
            proc.terminate()
            proc.wait(timeout=10)
