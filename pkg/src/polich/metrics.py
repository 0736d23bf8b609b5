"""Evaluation: tree accuracy, question quality and end-to-end PCD accuracy.

Question similarity is pluggable; the shipped fallback is token Jaccard and
every report names the provider that produced its numbers, so lexical
results are never mistaken for embedding-based ones.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from . import logic
from .corpus import PolicyRecord, value_to_text
from .expr import And, Leaf, Not, Or, Tree, parse_text, question_set, serialize

# Semantic-similarity cutoff used when filtering candidate spans.
SUITABILITY_THRESHOLD = 0.65


class SimilarityProvider(Protocol):
    name: str

    def similarity(self, a: str, b: str) -> float:
        """Symmetric score in [0, 1]; similarity(x, x) == 1."""
        ...


class JaccardSimilarity:
    """Token-level Jaccard over lowercased words (the lexical fallback)."""

    name = "jaccard"

    def similarity(self, a: str, b: str) -> float:
        set_a, set_b = set(a.lower().split()), set(b.lower().split())
        if not set_a and not set_b:
            return 1.0
        union = set_a | set_b
        return len(set_a & set_b) / len(union)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: str, references: list[str], max_n: int = 4) -> float:
    """Sentence BLEU: geometric mean of modified n-gram precisions up to
    ``max_n`` with the standard brevity penalty (closest reference length,
    ties to the shorter). Any zero precision yields 0."""
    cand = candidate.lower().split()
    refs = [r.lower().split() for r in references]
    if not cand or not refs:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand_grams = _ngrams(cand, n)
        total = sum(cand_grams.values())
        if total == 0:
            return 0.0
        clipped = 0
        for gram, count in cand_grams.items():
            best = max(_ngrams(ref, n).get(gram, 0) for ref in refs)
            clipped += min(count, best)
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / total) / max_n
    closest = min((abs(len(r) - len(cand)), len(r)) for r in refs)[1]
    brevity = 1.0 if len(cand) >= closest else math.exp(1 - closest / len(cand))
    return brevity * math.exp(log_sum)


def rouge_l(candidate: str, reference: str) -> float:
    """LCS-based F-measure over lowercased tokens."""
    cand = candidate.lower().split()
    ref = reference.lower().split()
    if not cand or not ref:
        return 0.0
    lengths = [[0] * (len(ref) + 1) for _ in range(len(cand) + 1)]
    for i, a in enumerate(cand):
        for j, b in enumerate(ref):
            lengths[i + 1][j + 1] = (lengths[i][j] + 1 if a == b
                                     else max(lengths[i][j + 1], lengths[i + 1][j]))
    lcs = lengths[-1][-1]
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return 2 * precision * recall / (precision + recall)


def max_similarity(question: str, gold: Sequence[str],
                   provider: SimilarityProvider) -> float:
    if not gold:
        raise ValueError("gold question list must be non-empty")
    return max(provider.similarity(question, g) for g in gold)


def filter_suitable_spans(spans: Sequence[str], gold_questions: Sequence[str],
                          provider: SimilarityProvider,
                          threshold: float = SUITABILITY_THRESHOLD) -> list[str]:
    """Spans whose best similarity to any gold question reaches the cutoff."""
    return [s for s in spans
            if gold_questions and max_similarity(s, gold_questions, provider) >= threshold]


def align_questions(generated: Sequence[str], gold: Sequence[str],
                    provider: SimilarityProvider) -> dict[int, int]:
    """Greedy maximum matching of generated to gold questions: repeatedly
    take the globally best-scoring unmatched pair; ties break by (generated
    index, gold index). The result is injective on both sides."""
    pairs = sorted(
        ((provider.similarity(g, h), i, j)
         for i, g in enumerate(generated) for j, h in enumerate(gold)),
        key=lambda t: (-t[0], t[1], t[2]))
    mapping: dict[int, int] = {}
    used_gold: set[int] = set()
    for _, i, j in pairs:
        if i in mapping or j in used_gold:
            continue
        mapping[i] = j
        used_gold.add(j)
    return mapping


@dataclass
class TreeMetrics:
    identical_rate: float
    equivalent_rate: float
    total: int
    identical_count: int
    equivalent_count: int

    def to_dict(self) -> dict:
        return {"identical": self.identical_rate, "equivalent": self.equivalent_rate,
                "total": self.total, "identical_count": self.identical_count,
                "equivalent_count": self.equivalent_count}


def tree_metrics(predictions: Iterable[tuple[Tree, Tree]]) -> TreeMetrics:
    """Rates of syntactic identity and logical equivalence over
    (predicted, gold) pairs. Identical pairs count as equivalent too."""
    total = identical_count = equivalent_count = 0
    for predicted, gold in predictions:
        total += 1
        if logic.identical(predicted, gold):
            identical_count += 1
        if logic.equivalent(predicted, gold):
            equivalent_count += 1
    if total == 0:
        return TreeMetrics(0.0, 0.0, 0, 0, 0)
    return TreeMetrics(identical_count / total, equivalent_count / total,
                       total, identical_count, equivalent_count)


@dataclass
class PcdReport:
    """End-to-end policy compliance accuracy. Micro is instance-weighted;
    macro is the unweighted mean of per-gold-label accuracies. Predictions
    of "unknown" count as their own label (see unknown_count)."""

    micro_accuracy: float
    macro_accuracy: float
    per_label_accuracy: dict[str, float]
    unknown_count: int
    total: int

    def to_dict(self) -> dict:
        return {"micro_accuracy": self.micro_accuracy,
                "macro_accuracy": self.macro_accuracy,
                "per_label_accuracy": dict(self.per_label_accuracy),
                "unknown_count": self.unknown_count,
                "total": self.total}


def pcd_evaluate(records: Iterable[tuple[Tree, dict[int, logic.TruthValue],
                                         logic.TruthValue]]) -> PcdReport:
    """Evaluate each tree on its answer assignment and compare with the gold
    label. Raises MissingAnswerError when answers do not cover the tree."""
    total = correct = unknown_count = 0
    by_label: dict[str, list[int]] = {}
    for tree, answers, gold_label in records:
        predicted = logic.evaluate(tree, answers)
        if predicted is None:
            unknown_count += 1
        hit = int(predicted == gold_label)
        total += 1
        correct += hit
        by_label.setdefault(value_to_text(gold_label), []).append(hit)
    per_label = {label: sum(hits) / len(hits) for label, hits in sorted(by_label.items())}
    micro = correct / total if total else 0.0
    macro = sum(per_label.values()) / len(per_label) if per_label else 0.0
    return PcdReport(micro, macro, per_label, unknown_count, total)


@dataclass
class CorpusStats:
    total: int
    with_tree: int
    single_question_fraction: float
    both_operators_fraction: float
    question_count_dist: dict[int, int] = field(default_factory=dict)
    operator_count_dist: dict[int, int] = field(default_factory=dict)
    unique_operator_count_dist: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"total": self.total, "with_tree": self.with_tree,
                "single_question_fraction": self.single_question_fraction,
                "both_operators_fraction": self.both_operators_fraction,
                "question_count_dist": dict(sorted(self.question_count_dist.items())),
                "operator_count_dist": dict(sorted(self.operator_count_dist.items())),
                "unique_operator_count_dist":
                    dict(sorted(self.unique_operator_count_dist.items()))}


def _operator_profile(tree: Tree) -> tuple[int, int]:
    """(operator token count, distinct operator type count incl. parens)."""
    tokens = serialize(tree)
    kinds = set()
    count = 0
    for token in tokens:
        if token in (10, 11, 12):  # and, or, not
            kinds.add(token)
            count += 1
        elif token == 13:  # parentheses count as one operator type
            kinds.add(13)
    return count, len(kinds)


def corpus_stats(corpus: Iterable[PolicyRecord]) -> CorpusStats:
    """Tree-shape statistics: fraction of single-question trees ("Q0" /
    "not Q0"), fraction mixing both and/or, plus question- and
    operator-count distributions."""
    total = with_tree = single = both = 0
    question_dist: Counter = Counter()
    operator_dist: Counter = Counter()
    unique_dist: Counter = Counter()
    for record in corpus:
        total += 1
        if record.tree is None:
            continue
        with_tree += 1
        tree = parse_text(record.tree)
        n = len(question_set(tree))
        question_dist[n] += 1
        op_count, unique_ops = _operator_profile(tree)
        operator_dist[op_count] += 1
        unique_dist[unique_ops] += 1
        if n == 1:
            single += 1
        has_and, has_or = _contains_and_or(tree)
        if has_and and has_or:
            both += 1
    return CorpusStats(
        total=total, with_tree=with_tree,
        single_question_fraction=single / with_tree if with_tree else 0.0,
        both_operators_fraction=both / with_tree if with_tree else 0.0,
        question_count_dist=dict(question_dist),
        operator_count_dist=dict(operator_dist),
        unique_operator_count_dist=dict(unique_dist))


def _contains_and_or(tree: Tree) -> tuple[bool, bool]:
    if isinstance(tree, Leaf):
        return False, False
    if isinstance(tree, Not):
        return _contains_and_or(tree.child)
    has_and = isinstance(tree, And)
    has_or = isinstance(tree, Or)
    for child in tree.children:
        a, o = _contains_and_or(child)
        has_and |= a
        has_or |= o
    return has_and, has_or


def render_report(title: str, payload: dict) -> str:
    """Flat "key: value" text document; nested dicts flatten with dots."""
    lines = [f"report: {title}"]

    def emit(prefix: str, value) -> None:
        if isinstance(value, dict):
            for key, inner in value.items():
                emit(f"{prefix}.{key}" if prefix else str(key), inner)
        elif isinstance(value, float):
            lines.append(f"{prefix}: {value:.6f}")
        else:
            lines.append(f"{prefix}: {value}")

    emit("", payload)
    return "\n".join(lines) + "\n"
