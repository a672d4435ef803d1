import json
import subprocess
import sys

import numpy as np
import pytest

CLI = [sys.executable, "-m", "scml.cli"]


def run_cli(*args):
    return subprocess.run(CLI + list(args), capture_output=True, text=True)


@pytest.fixture(scope="module")
def blob_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "blobs.csv"
    result = run_cli("synth", "--kind", "blobs", "--n", "120", "--classes", "3",
                     "--dims", "3", "--spread", "0.4", "--seed", "5",
                     "--output", str(path))
    assert result.returncode == 0, result.stderr
    return path


def test_synth_cuboids_shape(tmp_path):
    out = tmp_path / "ds3.csv"
    result = run_cli("synth", "--kind", "cuboids3", "--n", "1600",
                     "--seed", "1", "--output", str(out))
    assert result.returncode == 0, result.stderr
    rows = out.read_text().splitlines()
    assert len(rows) == 1600
    assert all(len(r.split(",")) == 4 for r in rows[:5])
    labels = {r.split(",")[3] for r in rows}
    assert labels == {"0", "1", "2"}


def test_synth_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        result = run_cli("synth", "--kind", "grid2d", "--rows", "8", "--cols", "8",
                         "--jitter", "0.1", "--seed", "3", "--output", str(out))
        assert result.returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_synth_invalid_n(tmp_path):
    result = run_cli("synth", "--kind", "cuboids3", "--n", "0",
                     "--output", str(tmp_path / "x.csv"))
    assert result.returncode == 2
    assert result.stderr


def test_embed_end_to_end(tmp_path, blob_csv):
    out = tmp_path / "emb.csv"
    result = run_cli("embed", "--input", str(blob_csv), "--output", str(out),
                     "--dim", "2", "--k1", "4", "--seed", "42",
                     "--label-col", "3", "--diagnostics")
    assert result.returncode == 0, result.stderr
    rows = [r.split(",") for r in out.read_text().splitlines()]
    assert len(rows) == 120
    assert all(len(r) == 3 for r in rows)  # two coordinates + label

    diag_lines = (tmp_path / "emb.diag").read_text().splitlines()
    records = [json.loads(line) for line in diag_lines]
    stages = {r["stage"] for r in records}
    assert {"sampling", "optimize", "total"} <= stages
    total = next(r for r in records if r["stage"] == "total")
    assert total["detail"]["landmark_count"] > 0
    assert len(total["detail"]["loss_history"]) == 51
    assert all(r["wall_ms"] >= 0 for r in records)


def test_embed_missing_input_flag():
    result = run_cli("embed", "--output", "x.csv")
    assert result.returncode == 2


def test_embed_nonexistent_file(tmp_path):
    result = run_cli("embed", "--input", str(tmp_path / "missing.csv"),
                     "--output", str(tmp_path / "o.csv"))
    assert result.returncode == 1


def test_embed_k1_zero(tmp_path, blob_csv):
    out = tmp_path / "emb0.csv"
    result = run_cli("embed", "--input", str(blob_csv), "--output", str(out),
                     "--k1", "0", "--label-col", "3")
    assert result.returncode == 0, result.stderr
    assert len(out.read_text().splitlines()) == 120


def test_embed_bad_k1(tmp_path, blob_csv):
    result = run_cli("embed", "--input", str(blob_csv),
                     "--output", str(tmp_path / "o.csv"), "--k1", "-3")
    assert result.returncode == 2


def test_metrics_cc_identity(blob_csv):
    result = run_cli("metrics", "--metrics", "cc", "--high", str(blob_csv),
                     "--low", str(blob_csv))
    assert result.returncode == 0, result.stderr
    name, value, _ = result.stdout.strip().split(",")
    assert name == "cc"
    assert float(value) == pytest.approx(1.0)


def test_metrics_need_labels(blob_csv):
    result = run_cli("metrics", "--metrics", "kmeans-acc", "--high", str(blob_csv))
    assert result.returncode == 2
    assert "labels" in result.stderr


def test_metrics_unknown_name(blob_csv):
    result = run_cli("metrics", "--metrics", "bogus", "--high", str(blob_csv))
    assert result.returncode == 2


def test_metrics_deterministic(tmp_path, blob_csv):
    labels = tmp_path / "labels.csv"
    rows = [r.rsplit(",", 1) for r in blob_csv.read_text().splitlines()]
    labels.write_text("\n".join(lbl for _, lbl in rows) + "\n")
    features = tmp_path / "features.csv"
    features.write_text("\n".join(feat for feat, _ in rows) + "\n")
    args = ("metrics", "--metrics", "knn-acc,kmeans-acc", "--high",
            str(features), "--labels", str(labels), "--seed", "7")
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout
    lines = first.stdout.strip().splitlines()
    assert lines[0].startswith("knn-acc,") and lines[1].startswith("kmeans-acc,")


def test_metrics_odoc(tmp_path, blob_csv):
    rows = [r.rsplit(",", 1) for r in blob_csv.read_text().splitlines()]
    labels = tmp_path / "labels.csv"
    labels.write_text("\n".join(lbl for _, lbl in rows) + "\n")
    features = tmp_path / "features.csv"
    features.write_text("\n".join(feat for feat, _ in rows) + "\n")
    sample = tmp_path / "sample.csv"
    sample.write_text("\n".join(str(i) for i in range(120)) + "\n")
    result = run_cli("metrics", "--metrics", "odoc", "--high", str(features),
                     "--labels", str(labels), "--sample", str(sample))
    assert result.returncode == 0, result.stderr
    assert float(result.stdout.strip().split(",")[1]) == pytest.approx(0.0, abs=1e-12)


def test_help_lists_defaults():
    result = run_cli("embed", "--help")
    assert result.returncode == 0
    for flag in ("--k1", "--k2", "--gamma", "--epochs", "--warmup",
                 "--eta-max", "--eta-min", "--seed", "--diagnostics"):
        assert flag in result.stdout
