"""Non-neural text-side baselines.

Pattern-based span extraction from policy text, rule-based rephrasing of
declarative spans into questions, and tree inference from the bullet
structure of a policy. The rephrase table ships as data
(``data/rephrase_patterns.tsv``, overridable via ``POLICH_PATTERNS``) so a
different phrase set can be dropped in without code changes.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .corpus import Bullet
from .expr import And, Leaf, Not, Or, Tree

DEFAULT_CUES = ("must be", "should apply", "must", "should", "need to",
                "required to", "would")

_AND_CUE = re.compile(r"\b(must|both)\b", re.IGNORECASE)
_OR_CUE = re.compile(r"\b(any|either)\b", re.IGNORECASE)
_NEGATION_CUE = re.compile(r"\bnot\b|n't\b", re.IGNORECASE)

# Determiners etc. that mark a span as a noun phrase; those get the
# "Do you have" fallback prefix, everything else gets "Are you".
_NOUN_PHRASE_LEADS = frozenset(
    "a an the your my our this that these those some any one two no".split())

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


@dataclass
class PolicyText:
    """Policy prose plus its bullet blocks; ``lead_in`` is the sentence
    immediately preceding each block."""

    prose: str
    bullets: list[Bullet] = field(default_factory=list)


@dataclass(frozen=True)
class RephrasePattern:
    match_prefix: str
    replacement: str
    kind: str  # swap | prefix_do_you_have | prefix_are_you


def load_patterns(path: str | Path | None = None) -> list[RephrasePattern]:
    """Read the pattern table: one pattern per line, tab-separated
    (match_prefix, replacement, kind); '#' starts a comment."""
    if path is None:
        path = os.environ.get("POLICH_PATTERNS")
    if path is None:
        text = (resources.files("polich") / "data/rephrase_patterns.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    patterns = []
    for line in text.splitlines():
        line = line.rstrip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"bad pattern line (need 3 tab-separated fields): {line!r}")
        patterns.append(RephrasePattern(*fields))
    return patterns


def split_sentences(prose: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_SPLIT.split(prose) if s.strip()]


def extract_spans(policy: PolicyText, cues: tuple[str, ...] = DEFAULT_CUES) -> list[str]:
    """Bullet items plus prose sentences containing a cue expression.

    Cue matching is case-insensitive and word-boundary anchored.
    """
    spans = [item for bullet in policy.bullets for item in bullet.items]
    cue_res = [re.compile(r"\b" + re.escape(cue) + r"\b", re.IGNORECASE) for cue in cues]
    for sentence in split_sentences(policy.prose):
        if any(cue.search(sentence) for cue in cue_res):
            spans.append(sentence)
    return spans


def _strip_terminal(span: str) -> str:
    return span.rstrip(" .?!")


def rephrase_span(span: str, patterns: list[RephrasePattern] | None = None) -> str:
    """Turn a declarative span into a question.

    The first pattern whose prefix matches the span's leading words is
    applied; otherwise a fallback prefix is chosen ("Do you have" for noun
    phrases, "Are you" for everything else). The result ends with "?".
    """
    if patterns is None:
        patterns = load_patterns()
    body = _strip_terminal(span)
    if not body:
        return "?"
    lowered = body.lower()
    for pattern in patterns:
        prefix = pattern.match_prefix.lower()
        if lowered == prefix or lowered.startswith(prefix + " "):
            if pattern.kind == "swap":
                return f"{pattern.replacement}{body[len(prefix):]}?"
            if pattern.kind == "prefix_do_you_have":
                return f"Do you have {body[0].lower()}{body[1:]}?"
            return f"Are you {body[0].lower()}{body[1:]}?"
    first_word = lowered.split()[0]
    if first_word in _NOUN_PHRASE_LEADS:
        return f"Do you have {body[0].lower()}{body[1:]}?"
    return f"Are you {body[0].lower()}{body[1:]}?"


def _combine(leaves: list[Tree], conjunctive: bool) -> Tree:
    if len(leaves) == 1:
        return leaves[0]
    return And(tuple(leaves)) if conjunctive else Or(tuple(leaves))


def infer_tree_patterns(policy: PolicyText, question_count: int) -> Tree:
    """Rule-based tree from policy structure.

    Bullet questions (mapped positionally onto the first ids) join with
    ``or`` when the lead-in contains "any" or "either", with ``and`` when it
    contains "must" or "both", and with ``or`` otherwise; a negated lead-in
    ("not" / "n't") wraps the bullet group in ``not``. Every remaining
    connection defaults to ``and``.
    """
    if question_count < 1:
        raise ValueError("question_count must be >= 1")
    parts: list[Tree] = []
    next_id = 0
    for bullet in policy.bullets:
        if next_id >= question_count:
            break
        take = min(len(bullet.items), question_count - next_id)
        if take == 0:
            continue
        leaves: list[Tree] = [Leaf(i) for i in range(next_id, next_id + take)]
        next_id += take
        conjunctive = (not _OR_CUE.search(bullet.lead_in)
                       and bool(_AND_CUE.search(bullet.lead_in)))
        group = _combine(leaves, conjunctive=conjunctive)
        if _NEGATION_CUE.search(bullet.lead_in):
            group = Not(group)
        parts.append(group)
    parts.extend(Leaf(i) for i in range(next_id, question_count))
    return parts[0] if len(parts) == 1 else And(tuple(parts))
