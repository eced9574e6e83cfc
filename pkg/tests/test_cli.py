import csv
import json
import subprocess
import sys

import pytest

from xlingmap.cli import main
from xlingmap.embeddings import load_embeddings
from xlingmap.evaluation import load_gold

FAST = ["--window", "5", "--init-cutoff", "150"]


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--vocab", "150", "--dim", "8", "--noise", "0.01",
                 "--seed", "3", "--out-dir", str(out)]) == 0
    return out


def _data(d):
    return ["--src", str(d / "src.vec"), "--trg", str(d / "trg.vec"), "--gold", str(d / "gold.txt")]


def test_synth_files(synth_dir):
    src = load_embeddings(synth_dir / "src.vec")
    assert len(src) == 150 and src.dim == 8
    assert len(load_gold(synth_dir / "gold.txt")) == 150


def test_map(synth_dir, tmp_path, capsys):
    log = tmp_path / "m.jsonl"
    assert main(["map", *_data(synth_dir), *FAST, "--seed", "4", "--log", str(log)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["accuracy"] > 0.99 and out["success"] and out["status"] == "converged"
    row = json.loads(log.read_text())
    assert row["seed"] == 4 and row["config"]["window"] == 5 and row["init"] == "unsupervised"


def test_config_file_and_flag_override(synth_dir, tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"window": 7, "csls_k": 4, "use_csls": False}))
    log = tmp_path / "m.jsonl"
    assert main(["map", *_data(synth_dir), "--config", str(cfg), "--csls-k", "6",
                 "--init", "rand", "--log", str(log)]) in (0, 1)
    row = json.loads(log.read_text())
    assert row["config"]["window"] == 7 and row["config"]["csls_k"] == 6
    assert row["config"]["use_csls"] is False and row["init"] == "random_complete"


def test_ablation_and_report(synth_dir, tmp_path, capsys):
    log = tmp_path / "a.jsonl"
    assert main(["ablation", *_data(synth_dir), *FAST, "--runs", "1", "--out", str(log)]) == 0
    assert capsys.readouterr().out.startswith("| experiment |")
    assert len(log.read_text().splitlines()) == 8
    out_csv = tmp_path / "r.csv"
    assert main(["report", "--log", str(log), "--format", "csv", "--out", str(out_csv)]) == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert rows[0]["experiment"] == "Full System" and len(rows) == 8


def test_grid_kind_required(synth_dir, tmp_path):
    with pytest.raises(SystemExit):
        main(["grid", *_data(synth_dir), "--out", str(tmp_path / "g.jsonl")])


@pytest.mark.parametrize("argv", [
    ["report", "--log", "/nonexistent/log.jsonl"],
    ["map", "--src", "/nope.vec", "--trg", "/nope.vec", "--gold", "/nope.txt"],
])
def test_errors_exit_nonzero(argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_bad_config_key(synth_dir, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["map", *_data(synth_dir), "--config", str(cfg)]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "xlingmap", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "ablation" in proc.stdout
