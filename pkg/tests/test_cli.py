import json

import pytest

from causalweb.cli import main


@pytest.fixture(scope="module")
def model1_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "m1.csv"
    assert main(["simulate", "--model", "1", "--steps", "1500", "--seed", "3",
                 "--out", str(path)]) == 0
    return path


def test_analyze_and_export(model1_csv, tmp_path, capsys):
    result = tmp_path / "r.json"
    code = main(["analyze", "--data", str(model1_csv), "--target", "x", "--lead", "1",
                 "--drivers", "y:1;z:1", "--k", "4", "--reference", "cauchy",
                 "--tail-cut", "0.0425", "--threads", "2", "--out", str(result)])
    assert code == 0
    doc = json.loads(result.read_text())
    assert set(doc["cs"]) == {"y", "z"}
    assert "cs(y)" in capsys.readouterr().out
    dot = tmp_path / "w.dot"
    assert main(["export-web", "--result", str(result), "--format", "dot",
                 "--threshold", "0.01", "--out", str(dot)]) == 0
    assert "digraph" in dot.read_text()
    web = tmp_path / "w.json"
    assert main(["export-web", "--result", str(result), "--format", "json", "--out", str(web)]) == 0
    assert json.loads(web.read_text())["target"] == "x"


def test_results_independent_of_threads(model1_csv, tmp_path):
    texts = []
    for threads in ("1", "3"):
        out = tmp_path / f"r{threads}.json"
        main(["analyze", "--data", str(model1_csv), "--target", "x", "--drivers", "y;z",
              "--threads", threads, "--out", str(out)])
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_diagnose(model1_csv, tmp_path, capsys):
    out = tmp_path / "d.json"
    code = main(["diagnose", "--data", str(model1_csv), "--target", "x", "--drivers", "y",
                 "--obs-noise", "0.01", "--reps", "2", "--threshold", "0.15", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["diagnostics"]["missing_process"]["n_reps"] == 2
    assert "confounder candidates" in capsys.readouterr().out


def test_simulate_other_systems(tmp_path):
    assert main(["simulate", "--model", "coupled-lorenz", "--steps", "50", "--seed", "1",
                 "--eps", "2", "--dt", "0.01", "--out", str(tmp_path / "c.csv")]) == 0
    assert main(["simulate", "--model", "4", "--steps", "50", "--seed", "1",
                 "--noise-notation", "std", "--out", str(tmp_path / "m4.csv")]) == 0


def test_validation_errors_exit_1(tmp_path, model1_csv):
    assert main(["analyze", "--data", str(tmp_path / "missing.csv"), "--target", "x",
                 "--drivers", "y", "--out", str(tmp_path / "r.json")]) == 1
    assert main(["analyze", "--data", str(model1_csv), "--target", "q",
                 "--drivers", "y", "--out", str(tmp_path / "r.json")]) == 1
    assert main(["simulate", "--model", "9", "--steps", "5", "--out", "x.csv"]) == 1
    assert main(["export-web", "--result", str(model1_csv), "--out", "w.dot"]) == 1


def test_numerical_failure_exits_2(tmp_path):
    assert main(["simulate", "--model", "lorenz63", "--steps", "500", "--dt", "0.5",
                 "--out", str(tmp_path / "l.csv")]) == 2


def test_env_thread_override(model1_csv, tmp_path, monkeypatch):
    monkeypatch.setenv("CAUSALWEB_THREADS", "2")
    assert main(["analyze", "--data", str(model1_csv), "--target", "x", "--drivers", "y;z",
                 "--out", str(tmp_path / "r.json")]) == 0


def test_bench_small(capsys):
    assert main(["bench", "--table", "3", "--steps", "800", "--threads", "1"]) == 0
    out = capsys.readouterr().out
    assert "M1 cs(x;y)" in out and "within tolerance" in out
