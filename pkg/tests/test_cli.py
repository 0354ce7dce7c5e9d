import json
import subprocess
import sys

import pytest

from fibdistill.braids import BraidWord, is_pure, weave_trajectory
from fibdistill.cli import main


@pytest.fixture
def words(tmp_path, b_word, w_word):
    b_word.save(tmp_path / "b.braid")
    w_word.save(tmp_path / "w.braid")
    return tmp_path


def write_config(folder, **overrides):
    cfg = {"k": 1, "m": 2, "p": 0.5, "epsilon": 1e-3, "bWordPath": "b.braid",
           "wWordPath": "w.braid", "seed": 7}
    cfg.update(overrides)
    cfg = {k: v for k, v in cfg.items() if v is not None}
    path = folder / "run.json"
    path.write_text(json.dumps(cfg))
    return path


def error_of(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_compile_not_purebraid(tmp_path, capsys):
    out = tmp_path / "b.braid"
    assert main(["compile", "not-purebraid", "--epsilon", "1e-2", "--out", str(out)]) == 0
    word = BraidWord.load(out)
    assert word.strands == 4 and is_pure(word)
    meta = json.loads((tmp_path / "b.braid.meta.jsonl").read_text())
    assert meta["achievedEpsilon"] <= 1e-2
    assert meta["wordLength"] == len(word)
    assert {"target", "constraint", "requestedEpsilon", "skDepth", "netParameters"} <= set(meta)
    assert json.loads(capsys.readouterr().out) == meta


def test_compile_injection_weave(tmp_path):
    out = tmp_path / "w.braid"
    assert main(["compile", "injection-weave", "--epsilon", "1e-2", "--out", str(out)]) == 0
    word = BraidWord.load(out)
    assert weave_trajectory(word, 3)[-1] == 1


@pytest.mark.parametrize("eps", ["0", "-1e-3", "nan"])
def test_compile_rejects_bad_epsilon(tmp_path, capsys, eps):
    assert main(["compile", "not-purebraid", f"--epsilon={eps}", "--out", str(tmp_path / "x")]) == 2
    assert error_of(capsys)["error"] == "usage"
    assert not (tmp_path / "x").exists()


def test_distill_run(words, capsys):
    cfg = write_config(words)
    out = words / "out"
    assert main(["distill", "--config", str(cfg), "--out", str(out)]) == 0
    rec = json.loads((out / "report.jsonl").read_text())
    assert rec["schemaVersion"] == 1
    assert rec["finalError"] <= rec["budget"]["overall"]
    assert rec["ensembleWeightInSupport"] == pytest.approx(0.75)
    assert "finalOverlap" in rec and rec["withinBudget"] is True
    assert (out / "summary.txt").read_text() == capsys.readouterr().out
    csv = (out / "leakage.csv").read_text().splitlines()
    assert csv[0].startswith("level,cable_width") and len(csv) == 2


def test_distill_is_byte_identical(words):
    cfg = write_config(words, m=4, k=1)
    assert main(["distill", "--config", str(cfg), "--out", str(words / "a")]) == 0
    assert main(["distill", "--config", str(cfg), "--out", str(words / "b"), "--jobs", "3"]) == 0
    for name in ("report.jsonl", "summary.txt", "leakage.csv"):
        assert (words / "a" / name).read_bytes() == (words / "b" / name).read_bytes()


def test_seed_flag_overrides_config(words):
    cfg = write_config(words)
    assert main(["distill", "--config", str(cfg), "--out", str(words / "a"), "--seed", "11"]) == 0
    rec = json.loads((words / "a" / "report.jsonl").read_text())
    assert rec["config"]["seed"] == 11 and rec["config"]["exactEnsemble"] is True


def test_oversized_layout_is_refused(words, capsys):
    cfg = write_config(words, m=16, k=2, sampleCount=200)
    assert main(["distill", "--config", str(cfg), "--out", str(words / "a")]) == 2
    assert "limit" in error_of(capsys)["message"]
    assert not (words / "a").exists()


def test_missing_word_file(words, capsys):
    cfg = write_config(words, bWordPath="nope.braid")
    assert main(["distill", "--config", str(cfg), "--out", str(words / "o")]) == 2
    assert "nope.braid" in error_of(capsys)["message"]


@pytest.mark.parametrize("overrides,fragment", [
    ({"p": 1.5}, "p must lie"),
    ({"m": 3}, "power of two"),
    ({"k": 0}, "positive integer"),
    ({"epsilon": -1}, "epsilon"),
    ({"bogus": 1}, "unknown config keys"),
    ({"wWordPath": None}, "missing config keys"),
])
def test_config_validation(words, capsys, overrides, fragment):
    cfg = write_config(words, **overrides)
    assert main(["distill", "--config", str(cfg), "--out", str(words / "o")]) == 2
    rec = error_of(capsys)
    assert rec["error"] == "config" and fragment in rec["message"]


def test_config_not_json(tmp_path, capsys):
    bad = tmp_path / "c.json"
    bad.write_text("{")
    assert main(["distill", "--config", str(bad), "--out", str(tmp_path)]) == 2


def test_structural_failures_listed(words, capsys):
    BraidWord.from_string(4, "1 2").save(words / "b.braid")
    BraidWord.from_string(3, "1").save(words / "w.braid")
    cfg = write_config(words)
    assert main(["distill", "--config", str(cfg), "--out", str(words / "o")]) == 1
    rec = error_of(capsys)
    assert rec["error"] == "structure" and len(rec["failures"]) == 2


def test_verify_purebraid_and_target(words, capsys):
    assert main(["verify", str(words / "b.braid"), "--check", "purebraid"]) == 0
    out = capsys.readouterr().out
    assert "identity permutation confirmed" in out and "sector tt11" in out
    assert main(["verify", str(words / "b.braid"), "--check", "target", "--epsilon", "1e-3"]) == 0
    assert "projective distance to NOT on V4" in capsys.readouterr().out
    assert main(["verify", str(words / "b.braid"), "--check", "target", "--epsilon", "1e-9"]) == 1


@pytest.mark.parametrize("check", ["artin", "unitarity"])
def test_verify_algebra(words, check, capsys):
    assert main(["verify", str(words / "w.braid"), "--check", check]) == 0
    assert f"{check}: PASS" in capsys.readouterr().out


def test_verify_weave(words, tmp_path, capsys):
    assert main(["verify", str(words / "w.braid"), "--check", "weave"]) == 0
    assert "3 -> 1" in capsys.readouterr().out
    bad = tmp_path / "bad.braid"
    BraidWord.from_string(3, "2 2 1").save(bad)
    assert main(["verify", str(bad), "--check", "weave"]) == 1
    assert "crossing 3 (s1, file line 4)" in capsys.readouterr().out


def test_verify_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.braid"
    bad.write_text("strands 3\nq1\n")
    assert main(["verify", str(bad), "--check", "artin"]) == 1
    assert error_of(capsys)["error"] == "parse"
    assert main(["verify", str(tmp_path / "none"), "--check", "artin"]) == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fibdistill", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("fibdistill ")
    out = subprocess.run([sys.executable, "-m", "fibdistill", "compile"], capture_output=True, text=True)
    assert out.returncode == 2
