"""Shared oracles for the test suite.

The oracles here deliberately avoid the library's own parser and evaluator:
validity and semantics are checked by compiling the expression to a Python
boolean expression (same precedence and associativity), so agreement between
the two implementations is meaningful evidence.
"""

import itertools
from pathlib import Path

import pytest

from polich import expr

FIXTURES = Path(__file__).parent / "fixtures"

_ORACLE_WORD = {expr.AND: "and", expr.OR: "or", expr.NOT: "not",
                expr.OPEN: "(", expr.CLOSE: ")"}


def oracle_python_source(tokens):
    """Token ids rendered as a Python boolean expression over names q0..q9."""
    words = []
    for token in tokens:
        if expr.is_question(token):
            words.append(f"q{token}")
        else:
            words.append(_ORACLE_WORD[token])
    return " ".join(words)


def oracle_is_valid(tokens, question_ids=None):
    """Independent validity check: the sequence must compile as a Python
    boolean expression (identical precedence rules) and be read-once; when
    ``question_ids`` is given, it must use exactly those questions."""
    if not tokens:
        return False
    seen = [t for t in tokens if expr.is_question(t)]
    if len(seen) != len(set(seen)):
        return False
    if question_ids is not None and set(seen) != set(question_ids):
        return False
    # Python-isms with no counterpart in the expression grammar: "q0 ( ... )"
    # compiles as a call and "( )" as an empty tuple. Exclude both.
    for prev, cur in zip(tokens, tokens[1:]):
        if cur == expr.OPEN and (expr.is_question(prev) or prev == expr.CLOSE):
            return False
        if prev == expr.OPEN and cur == expr.CLOSE:
            return False
    try:
        compile(oracle_python_source(tokens), "<oracle>", "eval")
    except SyntaxError:
        return False
    return True


def oracle_truth_table(tokens):
    """Semantics by evaluating the compiled Python expression on every
    assignment; rows in binary counting order, lowest id most significant.
    Returns a string of 0/1 characters."""
    question_ids = sorted(t for t in tokens if expr.is_question(t))
    source = compile(oracle_python_source(tokens), "<oracle>", "eval")
    bits = []
    for values in itertools.product([False, True], repeat=len(question_ids)):
        env = {f"q{q}": v for q, v in zip(question_ids, values)}
        bits.append("1" if eval(source, {}, env) else "0")
    return "".join(bits)


@pytest.fixture(scope="session")
def gold_corpus():
    from polich.corpus import load_corpus
    return load_corpus(FIXTURES / "gold.jsonl")
