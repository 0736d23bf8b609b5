"""Canonical file formats: JSON Lines corpora and tab-separated score files.

One record per line; field names are fixed (id, policy, bullets,
main_question, questions, tree, scenarios, augmented_from, strategy).
Truth values encode as "yes" / "no" / "unknown". Loading fail-fasts on any
record another module's invariants would reject.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from . import expr
from .errors import (DuplicateQuestionError, ExprSyntaxError, SchemaError,
                     TreeInvalidError, UnknownTokenError)
from .logic import TruthValue

_VALUE_TEXT = {True: "yes", False: "no", None: "unknown"}
_TEXT_VALUE = {"yes": True, "no": False, "unknown": None}


def value_to_text(value: TruthValue) -> str:
    return _VALUE_TEXT[value]


def text_to_value(text: str) -> TruthValue:
    if text not in _TEXT_VALUE:
        raise ValueError(f"expected yes/no/unknown, got {text!r}")
    return _TEXT_VALUE[text]


@dataclass
class Bullet:
    lead_in: str
    items: list[str]


@dataclass
class Scenario:
    scenario_id: str
    answers: dict[int, TruthValue]
    gold_label: TruthValue


@dataclass
class PolicyRecord:
    """One corpus row. ``questions[i]`` is the text of Qi (ids are dense).
    ``tree`` is the serialized gold tree, or None for prediction inputs."""

    id: str
    policy: str
    main_question: str
    questions: list[str]
    bullets: list[Bullet] = field(default_factory=list)
    tree: str | None = None
    scenarios: list[Scenario] = field(default_factory=list)
    augmented_from: str | None = None
    strategy: str | None = None

    def parsed_tree(self) -> expr.Tree | None:
        return expr.parse_text(self.tree) if self.tree is not None else None


def _check_record(record: PolicyRecord, line: int) -> None:
    n = len(record.questions)
    if n > expr.MAX_QUESTIONS:
        raise SchemaError(line, "questions", f"more than {expr.MAX_QUESTIONS} questions")
    if record.tree is not None:
        try:
            tree = expr.parse_text(record.tree)
        except (UnknownTokenError, ExprSyntaxError, DuplicateQuestionError) as exc:
            raise TreeInvalidError(line, str(exc)) from exc
        if expr.question_set(tree) != frozenset(range(n)):
            raise TreeInvalidError(
                line, f"tree references {sorted(expr.question_set(tree))}, "
                      f"record lists {n} questions")
    for scenario in record.scenarios:
        for qid in scenario.answers:
            if not 0 <= qid < n:
                raise SchemaError(line, "scenarios", f"answer for unknown Q{qid}")


def _parse_questions(raw, line: int) -> list[str]:
    if not isinstance(raw, list):
        raise SchemaError(line, "questions", "expected a list")
    texts = []
    for i, pair in enumerate(raw):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, str) for x in pair)):
            raise SchemaError(line, "questions", "expected [\"Qi\", text] pairs")
        qid, text = pair
        if qid != f"Q{i}":
            raise SchemaError(line, "questions", f"ids must be dense, got {qid!r} at {i}")
        texts.append(text)
    return texts


def _parse_scenario(raw, line: int) -> Scenario:
    if not isinstance(raw, dict):
        raise SchemaError(line, "scenarios", "expected objects")
    try:
        answers = {}
        for key, value in raw["answers"].items():
            if not key.startswith("Q"):
                raise SchemaError(line, "scenarios", f"bad answer key {key!r}")
            answers[int(key[1:])] = text_to_value(value)
        return Scenario(raw["scenario_id"], answers, text_to_value(raw["gold_label"]))
    except (KeyError, ValueError, AttributeError) as exc:
        raise SchemaError(line, "scenarios", str(exc)) from exc


def record_from_dict(raw: dict, line: int = 0) -> PolicyRecord:
    for name in ("id", "policy", "main_question", "questions"):
        if name not in raw:
            raise SchemaError(line, name, "missing")
    for name in ("id", "policy", "main_question"):
        if not isinstance(raw[name], str):
            raise SchemaError(line, name, "expected a string")
    bullets = []
    for item in raw.get("bullets", []):
        try:
            bullets.append(Bullet(item["lead_in"], list(item["items"])))
        except (KeyError, TypeError) as exc:
            raise SchemaError(line, "bullets", str(exc)) from exc
    record = PolicyRecord(
        id=raw["id"],
        policy=raw["policy"],
        main_question=raw["main_question"],
        questions=_parse_questions(raw["questions"], line),
        bullets=bullets,
        tree=raw.get("tree"),
        scenarios=[_parse_scenario(s, line) for s in raw.get("scenarios", [])],
        augmented_from=raw.get("augmented_from"),
        strategy=raw.get("strategy"),
    )
    _check_record(record, line)
    return record


def record_to_dict(record: PolicyRecord) -> dict:
    out: dict = {
        "id": record.id,
        "policy": record.policy,
        "bullets": [{"lead_in": b.lead_in, "items": b.items} for b in record.bullets],
        "main_question": record.main_question,
        "questions": [[f"Q{i}", text] for i, text in enumerate(record.questions)],
    }
    if record.tree is not None:
        out["tree"] = record.tree
    if record.scenarios:
        out["scenarios"] = [
            {"scenario_id": s.scenario_id,
             "answers": {f"Q{q}": value_to_text(v) for q, v in sorted(s.answers.items())},
             "gold_label": value_to_text(s.gold_label)}
            for s in record.scenarios
        ]
    if record.augmented_from is not None:
        out["augmented_from"] = record.augmented_from
    if record.strategy is not None:
        out["strategy"] = record.strategy
    return out


def load_corpus(path: str | Path) -> list[PolicyRecord]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(line_no, "<json>", str(exc)) from exc
            records.append(record_from_dict(raw, line_no))
    return records


def save_corpus(records: Iterable[PolicyRecord], path: str | Path) -> None:
    """Byte-stable write: fixed field order, sorted answer keys."""
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record_to_dict(record), ensure_ascii=False))
            handle.write("\n")


def load_scores(path: str | Path) -> dict[tuple[str, str], float]:
    """Tab-separated (record id, tree string, score) rows."""
    scores: dict[tuple[str, str], float] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise SchemaError(line_no, "<scores>", "expected 3 tab-separated fields")
            record_id, tree_string, raw_score = parts
            try:
                normalized = expr.tree_text(expr.parse_text(tree_string))
            except (UnknownTokenError, ExprSyntaxError, DuplicateQuestionError) as exc:
                raise TreeInvalidError(line_no, str(exc)) from exc
            scores[(record_id, normalized)] = float(raw_score)
    return scores


def save_scores(scores: dict[tuple[str, str], float], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for (record_id, tree_string), score in sorted(scores.items()):
            handle.write(f"{record_id}\t{tree_string}\t{score:.6f}\n")
