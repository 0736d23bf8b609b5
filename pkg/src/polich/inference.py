"""Tree-inference strategies that rank whole candidates instead of decoding.

Candidate pools come from training trees with the matching question count,
deduplicated by logical equivalence; when no such tree exists the caller
must skip the record. A lexical fallback scorer keeps the pipeline runnable
without a trained compatibility model; its scores are a stub and are
flagged as such in reports.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from . import logic
from .corpus import PolicyRecord
from .errors import EmptyCandidatesError, NoTreesForCountError, ScorerFailureError
from .expr import And, Leaf, Not, Or, Tree, parse_text, question_set, tree_text


class TreeScorer(Protocol):
    name: str

    def compatibility(self, policy: str, main_question: str,
                      questions: Sequence[str], candidate: Tree) -> float:
        """Higher is more compatible; must be deterministic."""
        ...


def candidate_set(corpus: Iterable[PolicyRecord], n: int) -> list[Tree]:
    """All gold training trees with exactly n questions, one canonical
    representative per equivalence class; empty when none exist."""
    pool = []
    for record in corpus:
        if record.tree is None:
            continue
        tree = parse_text(record.tree)
        if len(question_set(tree)) == n:
            pool.append(tree)
    return sorted(logic.dedup_by_equivalence(pool), key=tree_text)


def rank_candidates(record: PolicyRecord, candidates: Sequence[Tree],
                    scorer: TreeScorer) -> Tree:
    """Argmax-compatibility candidate; score ties break by canonical
    serialization order. Raises EmptyCandidatesError (skip rule)."""
    if not candidates:
        raise EmptyCandidatesError(record.id)
    ordered = sorted(candidates, key=tree_text)
    scores = [scorer.compatibility(record.policy, record.main_question,
                                   record.questions, c) for c in ordered]
    best = max(range(len(ordered)), key=lambda i: scores[i])
    return ordered[best]


def random_tree(n: int, rng_seed: int) -> Tree:
    """Uniform draw over the canonical syntactic space for n questions.

    Implemented by count-weighted recursive sampling, which is uniform over
    exactly enumerate_trees(n, "syntactic") without materializing it.
    """
    if not 1 <= n <= 6:
        raise ValueError("random_tree supports 1 <= n <= 6")
    return logic.sample_tree(n, random.Random(rng_seed))


@dataclass
class TrainingStats:
    """Canonical trees with frequencies, grouped by question count."""

    by_count: dict[int, list[tuple[Tree, int]]] = field(default_factory=dict)


def build_training_stats(corpus: Iterable[PolicyRecord]) -> TrainingStats:
    counts: dict[int, dict[str, tuple[Tree, int]]] = {}
    for record in corpus:
        if record.tree is None:
            continue
        tree = logic.canonicalize(parse_text(record.tree))
        n = len(question_set(tree))
        key = tree_text(tree)
        bucket = counts.setdefault(n, {})
        prev = bucket.get(key)
        bucket[key] = (tree, (prev[1] if prev else 0) + 1)
    return TrainingStats({n: sorted(bucket.values(), key=lambda pair: tree_text(pair[0]))
                          for n, bucket in sorted(counts.items())})


def most_common_tree(stats: TrainingStats, n: int) -> Tree:
    """Highest-frequency canonical training tree with n questions; frequency
    ties break by serialization order. Raises NoTreesForCountError."""
    if n not in stats.by_count or not stats.by_count[n]:
        raise NoTreesForCountError(n)
    entries = sorted(stats.by_count[n], key=lambda pair: (-pair[1], tree_text(pair[0])))
    return entries[0][0]


_CONJUNCTIVE_CUES = re.compile(r"\b(must|both|all|every|each)\b", re.IGNORECASE)
_DISJUNCTIVE_CUES = re.compile(r"\b(any|or|either)\b", re.IGNORECASE)
_NEGATION_CUES = re.compile(r"\bnot\b|n't\b|\bunless\b", re.IGNORECASE)


def _structure(tree: Tree) -> tuple[bool, bool, bool]:
    has_and = has_or = has_not = False

    def walk(node: Tree) -> None:
        nonlocal has_and, has_or, has_not
        if isinstance(node, Not):
            has_not = True
            walk(node.child)
        elif isinstance(node, And):
            has_and = True
            for child in node.children:
                walk(child)
        elif isinstance(node, Or):
            has_or = True
            for child in node.children:
                walk(child)

    walk(tree)
    return has_and, has_or, has_not


class LexicalTreeScorer:
    """Fallback stub: agreement between operator cue words in the policy and
    the candidate's structure. Only here so the pipeline runs end-to-end
    without a trained compatibility model."""

    name = "lexical-stub"

    def compatibility(self, policy, main_question, questions, candidate):
        text = f"{policy} {main_question}"
        has_and, has_or, has_not = _structure(candidate)
        score = 0.0
        score += 1.0 if bool(_CONJUNCTIVE_CUES.search(text)) == has_and else 0.0
        score += 1.0 if bool(_DISJUNCTIVE_CUES.search(text)) == has_or else 0.0
        score += 1.0 if bool(_NEGATION_CUES.search(text)) == has_not else 0.0
        return score


@dataclass
class PrecomputedScores:
    """Offline scores keyed by (record id, canonical tree string), as loaded
    from the tab-separated scores file."""

    scores: dict[tuple[str, str], float]
    name: str = "external"

    def scorer_for(self, record_id: str) -> TreeScorer:
        scores = self.scores

        class _Bound:
            name = self.name

            def compatibility(self, policy, main_question, questions, candidate):
                key = (record_id, tree_text(candidate))
                if key not in scores:
                    raise ScorerFailureError(
                        f"no precomputed score for record {record_id!r}, "
                        f"tree {tree_text(candidate)!r}")
                return scores[key]

        return _Bound()


def make_compatibility_examples(corpus: Iterable[PolicyRecord], negatives_per_record: int,
                                seed: int) -> list[tuple[str, str, int]]:
    """Labeled (record id, tree string, label) rows for training a
    compatibility model: the gold tree (label 1) plus sampled non-equivalent
    same-count trees (label 0)."""
    records = [r for r in corpus if r.tree is not None]
    rows: list[tuple[str, str, int]] = []
    for record in records:
        gold = parse_text(record.tree)
        n = len(question_set(gold))
        rows.append((record.id, tree_text(logic.canonicalize(gold)), 1))
        rng = random.Random(f"{seed}:{record.id}")
        negatives: list[Tree] = []
        attempts = 0
        while len(negatives) < negatives_per_record and attempts < 200:
            attempts += 1
            candidate = logic.sample_tree(n, rng) if n <= 6 else None
            if candidate is None:
                break
            if logic.equivalent(candidate, gold):
                continue
            if any(logic.identical(candidate, seen) for seen in negatives):
                continue
            negatives.append(candidate)
        rows.extend((record.id, tree_text(neg), 0) for neg in negatives)
    return rows
