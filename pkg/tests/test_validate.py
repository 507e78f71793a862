import json
import random

import pytest

from gendermt.corpus import Corpus, CorpusRecord, load_corpus
from gendermt.tagged import parse_tagged
from gendermt.validate import Diagnostic, Severity, diagnostics_to_jsonl, has_errors, validate
from conftest import fixture_path


def rec(rid, source, **targets):
    return CorpusRecord(rid, parse_tagged(source), {k: parse_tagged(v) for k, v in targets.items()})


def codes(diags):
    return [(d.code, d.side, d.position) for d in diags]


def test_target_ambiguous_tag():
    diags = validate([rec("1", "you <A1> are", tower="brave <A1>")])
    assert codes(diags) == [("V001", "target:tower", 0)]
    assert diags[0].severity is Severity.ERROR


def test_source_conflicting_genders():
    diags = validate([rec("1", "he <M1> and she <F1>")])
    assert codes(diags) == [("V002", "source", 2)]
    assert diags[0].severity is Severity.ERROR


def test_noncontiguous_indices():
    diags = validate([rec("1", "we <A2>")])
    assert codes(diags) == [("V003", "source", 0)]
    assert diags[0].severity is Severity.WARNING
    diags = validate([rec("1", "a <A1> b <M3> c <M3>")])
    assert codes(diags) == [("V003", "source", 1)]


def test_target_index_missing_from_source():
    diags = validate([rec("1", "she <F1> left", tower="partita <F1> rimasto <M2>")])
    assert codes(diags) == [("V004", "target:tower", 1)]


def test_untagged_source():
    diags = validate([rec("1", "nothing here")])
    assert codes(diags) == [("V005", "source", None)]


def test_clean_pair_is_clean():
    assert validate(load_corpus(fixture_path("clean.jsonl"))) == []


def test_target_mixed_genders_are_legal():
    assert validate([rec("125", "you <A1> 're dry", tower="asciutta <F1> bravo <M1>")]) == []


def test_lint_fixture_hits_each_rule_once():
    diags = validate(load_corpus(fixture_path("lint.jsonl")))
    assert [(d.code, d.record_id, d.side, d.position) for d in diags] == [
        ("V001", "v001", "target:tower", 1),
        ("V002", "v002", "source", 2),
        ("V003", "v003", "source", 0),
        ("V004", "v004", "target:tower", 5),
        ("V005", "v005", "source", None),
    ]


def test_ordering_within_record():
    r = rec("1", "a <M1> b <F1>", tower="x <A9> y <A1>", mbart="z <M7>")
    assert codes(validate([r])) == [
        ("V002", "source", 1),
        ("V001", "target:tower", 0),
        ("V004", "target:tower", 0),
        ("V001", "target:tower", 1),
        ("V004", "target:mbart", 0),
    ]


def test_permutation_permutes_diagnostics():
    c = load_corpus(fixture_path("lint.jsonl"))
    records = list(c.records)
    random.Random(3).shuffle(records)
    shuffled = validate(Corpus(tuple(records)))
    by_record = {r.id: validate([r]) for r in c}
    assert shuffled == [d for r in records for d in by_record[r.id]]


def test_has_errors_strictness():
    warn = [Diagnostic("V005", "1", "source", None, "x")]
    assert not has_errors(warn)
    assert has_errors(warn, strict=True)
    assert not has_errors([], strict=True)


def test_unknown_code_rejected():
    with pytest.raises(ValueError):
        Diagnostic("V999", "1", "source", None, "x")


def test_jsonl_schema():
    diags = validate([rec("1", "you <A1> are", tower="brave <A1>")])
    (line,) = diagnostics_to_jsonl(diags).splitlines()
    assert json.loads(line) == {
        "code": "V001", "severity": "error", "record_id": "1", "side": "target:tower", "position": 0,
        "message": diags[0].message,
    }
