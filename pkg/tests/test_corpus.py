"""Corpus round trips, schema validation, and the scores file format."""

import pytest

from polich.corpus import (Bullet, PolicyRecord, Scenario, load_corpus,
                           load_scores, record_from_dict, record_to_dict,
                           save_corpus, save_scores, text_to_value,
                           value_to_text)
from polich.errors import SchemaError, TreeInvalidError

from conftest import FIXTURES


def test_value_text_round_trip():
    for value, text in [(True, "yes"), (False, "no"), (None, "unknown")]:
        assert value_to_text(value) == text
        assert text_to_value(text) is value


def test_load_gold_fixture(gold_corpus):
    assert [r.id for r in gold_corpus] == ["r1", "r2", "r3", "r4", "r5", "r6"]
    r2 = gold_corpus[1]
    assert r2.tree == "Q0 and Q1"
    assert len(r2.questions) == 2
    assert r2.bullets[0].items[1] == "have a valid ID"
    assert r2.scenarios[2].answers == {0: None, 1: True}
    assert r2.scenarios[2].gold_label is None


def test_save_load_round_trip(tmp_path, gold_corpus):
    out = tmp_path / "copy.jsonl"
    save_corpus(gold_corpus, out)
    assert load_corpus(out) == gold_corpus
    # byte stability
    again = tmp_path / "again.jsonl"
    save_corpus(load_corpus(out), again)
    assert out.read_bytes() == again.read_bytes()


def test_record_dict_round_trip(gold_corpus):
    for record in gold_corpus:
        assert record_from_dict(record_to_dict(record)) == record


def test_missing_field_raises_schema_error():
    with pytest.raises(SchemaError):
        record_from_dict({"id": "x", "policy": "p", "questions": []})


def test_sparse_question_ids_rejected():
    raw = {"id": "x", "policy": "p", "main_question": "m",
           "questions": [["Q0", "a?"], ["Q2", "b?"]]}
    with pytest.raises(SchemaError):
        record_from_dict(raw)


def test_tree_must_cover_exactly_the_listed_questions():
    raw = {"id": "x", "policy": "p", "main_question": "m",
           "questions": [["Q0", "a?"], ["Q1", "b?"]], "tree": "Q0"}
    with pytest.raises(TreeInvalidError):
        record_from_dict(raw)
    raw["tree"] = "Q0 and Q2"
    with pytest.raises(TreeInvalidError):
        record_from_dict(raw)


def test_record_without_tree_is_allowed():
    raw = {"id": "x", "policy": "p", "main_question": "m",
           "questions": [["Q0", "a?"]]}
    assert record_from_dict(raw).tree is None


def test_scores_round_trip(tmp_path):
    scores = {("r1", "Q0 and Q1"): 0.75, ("r1", "Q0 or Q1"): 0.5,
              ("r2", "not Q0"): -1.25}
    path = tmp_path / "scores.tsv"
    save_scores(scores, path)
    assert load_scores(path) == scores


def test_scores_normalize_tree_text(tmp_path):
    path = tmp_path / "scores.tsv"
    path.write_text("r1\tQ0 and (Q1)\t0.5\n")
    assert load_scores(path) == {("r1", "Q0 and Q1"): 0.5}
