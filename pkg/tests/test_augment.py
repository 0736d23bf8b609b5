"""Augmentation strategies: soundness, dense re-indexing, determinism."""

import random

import pytest

from polich import augment, expr, logic
from polich.corpus import Bullet, PolicyRecord
from polich.errors import CannotPruneError, NotSplittableError

from conftest import FIXTURES


def _record(rid="x", tree="Q0 and Q1", questions=None, bullets=(), policy="p"):
    questions = questions or ["Are you over 18 and a resident?", "Do you have an ID?"]
    return PolicyRecord(id=rid, policy=policy, main_question="m?",
                        questions=list(questions), bullets=list(bullets),
                        tree=tree, scenarios=[])


def test_split_question_and():
    out = augment.split_question(_record(), 0, expr.And)
    assert out.questions == ["Are you over 18?", "Are you a resident?",
                             "Do you have an ID?"]
    # the split pair stays grouped under the replaced leaf
    assert out.tree == "( Q0 and Q1 ) and Q2"
    assert out.scenarios == []


def test_split_question_or_preserves_structure():
    record = _record(tree="not Q0 or Q1",
                     questions=["Is it damaged or used?", "Is it sealed?"])
    out = augment.split_question(record, 0, expr.Or)
    assert out.tree == "not ( Q0 or Q1 ) or Q2"
    assert out.questions[0] == "Is it damaged?"
    assert out.questions[1] == "Is it used?"


def test_split_question_reindexes_following_ids():
    record = _record(tree="Q0 and (Q1 or Q2)",
                     questions=["First?", "Is it new or sealed?", "Third?"])
    out = augment.split_question(record, 1, expr.Or)
    assert out.tree == "Q0 and ( ( Q1 or Q2 ) or Q3 )"
    assert len(out.questions) == 4


def test_split_question_requires_coordinator():
    with pytest.raises(NotSplittableError):
        augment.split_question(_record(questions=["Plain question?", "Other?"]),
                               0, expr.And)


def test_substitute_equivalent_tree_soundness_bulk():
    """1,000 seeded substitutions across n <= 5: every output is equivalent
    and none is identical."""
    rng = random.Random(2024)
    for i in range(1000):
        n = rng.randint(2, 5)
        tree = logic.sample_tree(n, rng)
        if not logic._has_binary_node(tree):
            continue
        record = _record(tree=expr.tree_text(tree),
                         questions=[f"q{k}?" for k in range(n)])
        out = augment.substitute_equivalent_tree(record, seed=i)
        new_tree = expr.parse_text(out.tree)
        assert logic.equivalent(tree, new_tree)
        assert not logic.identical(tree, new_tree)


def test_conditional_phrase_flips_operators():
    record = _record(policy="You need all of the following items.",
                     tree="Q0 and Q1")
    outputs = augment.substitute_conditional(record)
    assert len(outputs) == 1
    assert outputs[0].policy == "You need any of the following items."
    assert outputs[0].tree == "Q0 or Q1"


def test_conditional_phrase_no_match():
    assert augment.substitute_conditional(_record(policy="No cues here.")) == []


def test_omit_bullet_prunes_and_reindexes():
    record = _record(
        tree="Q0 and (Q1 or Q2)",
        questions=["A?", "B?", "C?"],
        bullets=[Bullet("All of:", ["a", "b", "c"])])
    out = augment.omit_bullet(record, 1)
    assert out.tree == "Q0 and Q1"
    assert out.questions == ["A?", "C?"]
    assert out.bullets == [Bullet("All of:", ["a", "c"])]


def test_omit_bullet_collapses_single_child():
    record = _record(tree="Q0 and (Q1 or Q2)", questions=["A?", "B?", "C?"],
                     bullets=[Bullet("All of:", ["a", "b", "c"])])
    out = augment.omit_bullet(record, 2)
    assert out.tree == "Q0 and Q1"


def test_omit_bullet_rejects_non_bullet_question():
    record = _record(bullets=[Bullet("All of:", ["a"])])
    with pytest.raises(CannotPruneError):
        augment.omit_bullet(record, 1)


def test_augment_corpus_deterministic(gold_corpus, tmp_path):
    config = augment.AugmentConfig(rng_seed=7)
    first = augment.augment_corpus(gold_corpus, config)
    second = augment.augment_corpus(gold_corpus, config)
    assert first == second
    assert all(r.augmented_from and r.strategy in augment.STRATEGIES for r in first)
    ids = [r.id for r in first]
    assert len(set(ids)) == len(ids)


def test_augment_corpus_outputs_validate(gold_corpus):
    for record in augment.augment_corpus(gold_corpus, augment.AugmentConfig(rng_seed=1)):
        tree = expr.parse_text(record.tree)
        assert expr.question_set(tree) == frozenset(range(len(record.questions)))


def test_augment_corpus_respects_strategy_subset(gold_corpus):
    config = augment.AugmentConfig(strategies=("equivalent_tree",),
                                   caps={"equivalent_tree": 1}, rng_seed=7)
    outputs = augment.augment_corpus(gold_corpus, config)
    assert outputs
    assert {r.strategy for r in outputs} == {"equivalent_tree"}
