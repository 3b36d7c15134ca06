import json
import subprocess
import sys
from pathlib import Path

import pytest

from qudit_cd.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_orbits_edgelist(capsys):
    code, out, _ = run(capsys, "orbits", "--graph", str(DATA / "path4.edgelist"), "--format", "edgelist")
    assert code == 0
    data = json.loads(out)
    assert data["vertex_orbits"] == [[1, 4], [2, 3]]
    assert data["edge_orbits"] == [[[1, 2], [3, 4]], [[2, 3]]]
    assert data["automorphisms"] == 2
    arcs = {tuple(map(tuple, o)) for o in data["arc_orbits"]}
    assert arcs == {((1, 2), (4, 3)), ((2, 1), (3, 4)), ((2, 3), (3, 2))}


def test_cdterms(capsys):
    code, out, _ = run(capsys, "cdterms", "--graph", str(DATA / "path4.edgelist"), "--format", "edgelist", "--problem", "ising")
    data = json.loads(out)
    assert code == 0 and data["pool_size"] == 10 and data["groups"] == 5
    assert "alphas" not in data
    code, out, _ = run(capsys, "cdterms", "--graph", str(DATA / "path4.edgelist"), "--format", "edgelist", "--problem", "ising", "--lambda", "0.5", "--grouped")
    data = json.loads(out)
    assert len(data["alphas"]) == 10 and data["grouped"] is True
    assert data["action"] <= data["action_without_cd"]
    for t in data["terms"]:
        assert all(1 <= s <= 4 for s in t["sites"])


def test_stats(capsys, tmp_path):
    corpus = tmp_path / "two.g6"
    corpus.write_text("Ch\nC~\n")
    code, out, _ = run(capsys, "stats", "--graphs", str(corpus), "--per-graph")
    data = json.loads(out)
    assert code == 0 and data["graphs"] == 2
    ratios = [row["ratio"] for row in data["per_graph"]]
    assert ratios[0] == pytest.approx(0.5)
    assert data["ratio"]["mean"] == pytest.approx(sum(ratios) / 2)


def test_graph6_round_trip(capsys, tmp_path, monkeypatch):
    code, out, _ = run(capsys, "decode-graph6", "D?{")
    assert code == 0
    edges = tmp_path / "star.edgelist"
    edges.write_text(out)
    code, out, _ = run(capsys, "encode-graph6", "--graph", str(edges))
    assert out.strip() == "D?{"


def test_solve_writes_files(capsys, tmp_path):
    cfg = {
        "problem": "max3cut",
        "graph": {"edges": [[1, 2]]},
        "ansatz": "cd-grouped",
        "restarts": 2,
        "optimizer": {"max_iterations": 40},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "solve", "--config", str(path), "--output-dir", str(tmp_path / "out"))
    assert code == 0
    assert (tmp_path / "out" / "trace.csv").exists()
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert len(summary["runs"]) == 2
    assert "approximation_ratio" in out


def test_errors_exit_two(capsys, tmp_path):
    code, _, err = run(capsys, "decode-graph6", "C~~")
    assert code == 2 and "error" in err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"problem": "ising", "graph": {"edges": [[1, 2]]}, "objective": "fidelity"}))
    code, _, err = run(capsys, "solve", "--config", str(bad))
    assert code == 2 and "fidelity" in err
    code, _, err = run(capsys, "orbits", "--graph", str(tmp_path / "missing.g6"))
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qudit_cd", "decode-graph6", "Ch"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert proc.stdout.splitlines() == ["n 4", "1 2", "2 3", "3 4"]
