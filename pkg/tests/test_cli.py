import json
import os
import subprocess
import sys

import pytest

from gendermt import cli
from conftest import fixture_path

REFERENCE = fixture_path("paper.jsonl")


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def squash(text):
    return "\n".join(" ".join(line.split()) for line in text.splitlines())


def test_validate_clean(capsys):
    code, out, err = run(["validate", fixture_path("clean.jsonl")], capsys)
    assert (code, out) == (0, "")


def test_validate_errors(capsys):
    code, out, _ = run(["validate", fixture_path("lint.jsonl")], capsys)
    assert code == 1
    assert [line.split("\t")[3].split()[0] for line in out.splitlines()] == ["V001", "V002", "V003", "V004", "V005"]


def test_validate_json_and_strict(capsys, tmp_path):
    p = tmp_path / "warn.jsonl"
    p.write_text('{"id":"1","source":"no tags","targets":{}}\n', encoding="utf-8")
    code, out, _ = run(["validate", str(p), "--json"], capsys)
    assert code == 0
    assert json.loads(out)["code"] == "V005"
    code, _, _ = run(["validate", str(p), "--strict"], capsys)
    assert code == 1


def test_stats(capsys):
    code, out, _ = run(["stats", REFERENCE], capsys)
    assert code == 0
    assert "Total Tags 1559 754 751" in squash(out)
    code, out, _ = run(["stats", REFERENCE, "--json"], capsys)
    assert json.loads(out)["source"] == {"M": 356, "F": 294, "A": 909, "total": 1559}


def test_evaluate(capsys, tmp_path):
    code, out, _ = run(["evaluate", REFERENCE, "--system", "tower", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "Match M 173" in squash(out)
    assert sorted(os.listdir(tmp_path)) == ["outcomes.csv", "sentences.csv", "summary.json", "summary.txt"]
    summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert summary["systems"][0]["counts"]["match_m"] == 173
    assert summary["input_digest"].startswith("sha256:")


def test_evaluate_refuses_invalid_unless_forced(capsys, tmp_path):
    code, out, err = run(["evaluate", fixture_path("lint.jsonl"), "--system", "tower"], capsys)
    assert code == 1
    assert "V001" in err and "--force" in err
    code, out, err = run(["evaluate", fixture_path("lint.jsonl"), "--system", "tower", "--force"], capsys)
    assert code == 0
    assert "skipped tower:v001" in err and "skipped tower:v002" in err


def test_evaluate_strict_blocks_on_warnings(capsys):
    code, _, _ = run(["evaluate", REFERENCE, "--system", "tower", "--strict"], capsys)
    assert code == 1


def test_compare(capsys, tmp_path):
    code, out, _ = run(["compare", REFERENCE, "--systems", "tower,mbart", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "precision M +2.9pp" in squash(out)
    assert "recall F +5.5pp" in squash(out)
    assert (tmp_path / "deltas.csv").exists()


def test_tsv_input(capsys, tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text("1\twe <F1> left\tsiamo partite <F1>\n", encoding="utf-8")
    code, out, _ = run(["evaluate", str(p), "--system", "default"], capsys)
    assert code == 0 and "Match F 1" in squash(out)
    q = tmp_path / "c.data"
    q.write_bytes(p.read_bytes())
    code, _, _ = run(["stats", str(q), "--format", "tsv"], capsys)
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["evaluate", REFERENCE, "--system", "nosuch"],
    ["evaluate", "/nonexistent/corpus.jsonl", "--system", "tower"],
    ["validate", REFERENCE, "--bogus"],
    ["evaluate", REFERENCE],
    ["compare", REFERENCE, "--systems", "tower"],
    [],
    ["frobnicate"],
])
def test_usage_and_io_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err


def test_parse_error_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"id":"1","source":"x <F0>","targets":{}}\n', encoding="utf-8")
    code, _, err = run(["validate", str(p)], capsys)
    assert code == 2
    assert "line 1" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gendermt", "validate", fixture_path("clean.jsonl")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == ""
