"""Corpus augmentation as structural, verifiable record transforms.

Four strategies: splitting a compound question into two, swapping the tree
for a logically equivalent one, substituting conditional phrases in the
policy (with the matching operator flip), and omitting a bullet point. Every
output tree is revalidated; augmented records carry ``augmented_from`` and
``strategy`` provenance and drop scenarios (their answers key off the
original question set).
"""

from __future__ import annotations

import dataclasses
import random
import re
from dataclasses import dataclass, field

from . import logic
from .corpus import Bullet, PolicyRecord
from .errors import CannotPruneError, NotSplittableError, PolichError
from .expr import (And, Leaf, MAX_QUESTIONS, Not, Or, Tree, parse_text,
                   question_set, tree_text, validate_tree)

STRATEGIES = ("split_question", "equivalent_tree", "conditional_phrase", "omit_bullet")


@dataclass(frozen=True)
class PhraseRule:
    from_phrase: str
    to_phrase: str
    transform: str  # and_to_or | or_to_and | negate_group | none


DEFAULT_PHRASE_TABLE = (
    PhraseRule("all of the following", "any of the following", "and_to_or"),
    PhraseRule("any of the following", "all of the following", "or_to_and"),
    PhraseRule("for all", "for any", "and_to_or"),
    PhraseRule("for any", "for all", "or_to_and"),
)


@dataclass
class AugmentConfig:
    strategies: tuple[str, ...] = STRATEGIES
    caps: dict[str, int] = field(default_factory=lambda: {s: 1 for s in STRATEGIES})
    rng_seed: int = 0
    phrase_table: tuple[PhraseRule, ...] = DEFAULT_PHRASE_TABLE

    def cap(self, strategy: str) -> int:
        return self.caps.get(strategy, 0)


_AUX_LEADS = frozenset(
    "are is was were am do does did have has had can could will would "
    "should must may shall".split())


def _remap(tree: Tree, mapping: dict[int, int]) -> Tree:
    if isinstance(tree, Leaf):
        return Leaf(mapping[tree.index])
    if isinstance(tree, Not):
        return Not(_remap(tree.child, mapping))
    cls = And if isinstance(tree, And) else Or
    return cls(tuple(_remap(c, mapping) for c in tree.children))


def _with_tree(record: PolicyRecord, tree: Tree, **changes) -> PolicyRecord:
    validate_tree(tree)
    return dataclasses.replace(record, tree=tree_text(tree), scenarios=[], **changes)


def split_question(record: PolicyRecord, qid: int, op: type) -> PolicyRecord:
    """Split question ``qid`` on its last top-level coordinator and replace
    its leaf with a two-leaf node of ``op`` (And or Or); ids re-index densely
    with the new question inserted right after the split one."""
    if record.tree is None:
        raise NotSplittableError(qid)
    if len(record.questions) >= MAX_QUESTIONS:
        raise NotSplittableError(qid)
    word = "and" if op is And else "or"
    text = record.questions[qid]
    matches = list(re.finditer(r"\b" + word + r"\b", text, re.IGNORECASE))
    if not matches:
        raise NotSplittableError(qid)
    cut = matches[-1]
    left = text[:cut.start()].strip()
    right = text[cut.end():].strip()
    if not left or not right:
        raise NotSplittableError(qid)
    lead = text.split()
    if lead and lead[0].lower() in _AUX_LEADS and not right.lower().startswith(lead[0].lower()):
        # carry the auxiliary + subject over: "Are you X and Y?" -> "Are you Y?"
        carried = " ".join(lead[:2]) if len(lead) > 1 else lead[0]
        right = f"{carried} {right}"
    left = left.rstrip(" .?!") + "?"
    right = right.rstrip(" .?!") + "?"

    tree = parse_text(record.tree)
    mapping = {i: (i if i <= qid else i + 1) for i in range(len(record.questions))}

    def rebuild(node: Tree) -> Tree:
        if isinstance(node, Leaf):
            if node.index == qid:
                return op((Leaf(qid), Leaf(qid + 1)))
            return Leaf(mapping[node.index])
        if isinstance(node, Not):
            return Not(rebuild(node.child))
        cls = And if isinstance(node, And) else Or
        return cls(tuple(rebuild(c) for c in node.children))

    questions = list(record.questions)
    questions[qid:qid + 1] = [left, right]
    return _with_tree(record, rebuild(tree), questions=questions)


def substitute_equivalent_tree(record: PolicyRecord, seed: int) -> PolicyRecord:
    """Swap the tree for a logically equivalent, non-identical one; policy
    and questions are untouched."""
    if record.tree is None:
        raise PolichError(f"record {record.id} has no tree")
    rewritten = logic.rewrite_equivalent(parse_text(record.tree), seed)
    return _with_tree(record, rewritten)


def _flip_ops(tree: Tree, source: type, target: type) -> Tree:
    if isinstance(tree, Leaf):
        return tree
    if isinstance(tree, Not):
        return Not(_flip_ops(tree.child, source, target))
    children = tuple(_flip_ops(c, source, target) for c in tree.children)
    if isinstance(tree, source):
        return target(children)
    cls = And if isinstance(tree, And) else Or
    return cls(children)


def _apply_transform(tree: Tree, transform: str) -> Tree:
    if transform == "none":
        return tree
    if transform == "and_to_or":
        return _flip_ops(tree, And, Or)
    if transform == "or_to_and":
        return _flip_ops(tree, Or, And)
    if transform == "negate_group":
        return tree.child if isinstance(tree, Not) else Not(tree)
    raise ValueError(f"unknown transform {transform!r}")


def substitute_conditional(record: PolicyRecord,
                           table: tuple[PhraseRule, ...] = DEFAULT_PHRASE_TABLE
                           ) -> list[PolicyRecord]:
    """One output record per table entry whose phrase occurs in the policy:
    the phrase is swapped everywhere and the tree transformed per the
    entry's tag. Empty list when nothing matches."""
    if record.tree is None:
        return []
    outputs = []
    tree = parse_text(record.tree)
    for rule in table:
        pattern = re.compile(re.escape(rule.from_phrase), re.IGNORECASE)
        if not pattern.search(record.policy):
            continue
        new_policy = pattern.sub(rule.to_phrase, record.policy)
        outputs.append(_with_tree(record, _apply_transform(tree, rule.transform),
                                  policy=new_policy))
    return outputs


def _bullet_item_count(record: PolicyRecord) -> int:
    return sum(len(b.items) for b in record.bullets)


def _prune(tree: Tree, qid: int) -> Tree | None:
    if isinstance(tree, Leaf):
        return None if tree.index == qid else tree
    if isinstance(tree, Not):
        kept = _prune(tree.child, qid)
        return None if kept is None else Not(kept)
    children = [c for c in (_prune(child, qid) for child in tree.children)
                if c is not None]
    if not children:
        return None
    if len(children) == 1:
        return children[0]
    cls = And if isinstance(tree, And) else Or
    return cls(tuple(children))


def omit_bullet(record: PolicyRecord, qid: int) -> PolicyRecord:
    """Drop the bullet-derived question ``qid``: the bullet item and question
    text are removed, its leaf is pruned from the tree (single-child parents
    collapse), and the remaining ids re-index densely."""
    if record.tree is None or qid >= _bullet_item_count(record):
        raise CannotPruneError(f"Q{qid} is not a bullet-derived question")
    tree = parse_text(record.tree)
    if len(question_set(tree)) < 2:
        raise CannotPruneError("tree is a single leaf")
    pruned = _prune(tree, qid)
    if pruned is None:
        raise CannotPruneError("pruning would leave an empty tree")
    mapping = {i: (i if i < qid else i - 1) for i in range(len(record.questions)) if i != qid}
    bullets = []
    position = 0
    for bullet in record.bullets:
        items = []
        for item in bullet.items:
            if position != qid:
                items.append(item)
            position += 1
        if items:
            bullets.append(Bullet(bullet.lead_in, items))
    questions = [q for i, q in enumerate(record.questions) if i != qid]
    return _with_tree(record, _remap(pruned, mapping),
                      questions=questions, bullets=bullets)


def augment_corpus(corpus: list[PolicyRecord], config: AugmentConfig) -> list[PolicyRecord]:
    """Apply the enabled strategies under their caps; deterministic given
    the seed, with provenance fields on every output record."""
    outputs: list[PolicyRecord] = []

    def emit(result: PolicyRecord, source: PolicyRecord, strategy: str, index: int) -> None:
        outputs.append(dataclasses.replace(
            result, id=f"{source.id}/{strategy}/{index}",
            augmented_from=source.id, strategy=strategy))

    for record in corpus:
        if record.tree is None:
            continue
        if "split_question" in config.strategies:
            produced = 0
            for qid in range(len(record.questions)):
                if produced >= config.cap("split_question"):
                    break
                text = record.questions[qid]
                last_and = max((m.start() for m in
                                re.finditer(r"\band\b", text, re.IGNORECASE)), default=-1)
                last_or = max((m.start() for m in
                               re.finditer(r"\bor\b", text, re.IGNORECASE)), default=-1)
                op = And if last_and >= last_or else Or
                try:
                    emit(split_question(record, qid, op), record,
                         "split_question", produced)
                    produced += 1
                except NotSplittableError:
                    continue
        if "equivalent_tree" in config.strategies:
            for k in range(config.cap("equivalent_tree")):
                try:
                    result = substitute_equivalent_tree(
                        record, random.Random(f"{config.rng_seed}:{record.id}:{k}").randrange(2**31))
                except PolichError:
                    break
                emit(result, record, "equivalent_tree", k)
        if "conditional_phrase" in config.strategies:
            variants = substitute_conditional(record, config.phrase_table)
            for k, result in enumerate(variants[:config.cap("conditional_phrase")]):
                emit(result, record, "conditional_phrase", k)
        if "omit_bullet" in config.strategies:
            produced = 0
            for qid in range(_bullet_item_count(record)):
                if produced >= config.cap("omit_bullet"):
                    break
                try:
                    emit(omit_bullet(record, qid), record, "omit_bullet", produced)
                    produced += 1
                except CannotPruneError:
                    continue
    return outputs
