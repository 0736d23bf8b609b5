"""Constrained decoding: soundness, completeness, mask minimality,
termination, and the trace format."""

import random

import pytest

from polich import decoder, expr, logic
from polich.kernels import AFTER_TERM
from polich.errors import BadConfigError, IllegalTransitionError, ScorerFailureError

from conftest import oracle_is_valid


def _decode_random(n, seed, config=decoder.DecodeConfig()):
    return decoder.decode(decoder.RandomScorer(seed), n, config)


def test_soundness_random_scorer():
    for n in range(1, 7):
        for seed in range(1000):
            tokens = _decode_random(n, seed)
            tree = expr.parse(tokens)
            assert expr.question_set(tree) == frozenset(range(n))
            assert oracle_is_valid(tokens, range(n))


def test_completeness_replay_all_canonical_trees():
    for n in range(1, 5):
        for tree in logic.iter_trees(n):
            target = expr.serialize(tree)
            out = decoder.decode(decoder.make_replay_scorer(target), n, decoder.STRICT)
            assert out == target, expr.to_text(target)


def test_default_config_rejects_double_negation_and_deep_nesting():
    for n in range(1, 5):
        for seed in range(200):
            tokens = _decode_random(n, seed)
            text = expr.to_text(tokens)
            assert "not not" not in text
            depth = peak = 0
            for token in tokens:
                depth += (token == expr.OPEN) - (token == expr.CLOSE)
                peak = max(peak, depth)
            assert peak <= 3


def test_open_budget_rule():
    # Open is only offered while at least two questions remain unused
    state = decoder.initial_state(1)
    assert expr.OPEN not in decoder.valid_tokens(state)
    state = decoder.initial_state(2)
    assert expr.OPEN in decoder.valid_tokens(state)
    state = decoder.next_state(state, 0, decoder.DecodeConfig())
    state = decoder.next_state(state, expr.AND, decoder.DecodeConfig())
    assert expr.OPEN not in decoder.valid_tokens(state)


def test_candidate_order_is_deterministic():
    state = decoder.initial_state(3)
    assert decoder.valid_tokens(state) == [0, 1, 2, expr.NOT, expr.OPEN]


def test_next_state_rejects_masked_token():
    state = decoder.initial_state(2)
    with pytest.raises(IllegalTransitionError):
        decoder.next_state(state, expr.AND, decoder.DecodeConfig())


def test_decode_rejects_bad_question_count():
    with pytest.raises(BadConfigError):
        decoder.decode(decoder.UniformScorer(), 0)
    with pytest.raises(BadConfigError):
        decoder.decode(decoder.UniformScorer(), 11)


def test_bad_config():
    with pytest.raises(BadConfigError):
        decoder.DecodeConfig(max_nesting_depth=0)


def test_scorer_must_cover_candidates():
    class Partial:
        def score(self, prefix, candidates):
            return {candidates[0]: 1.0}

    with pytest.raises(ScorerFailureError):
        decoder.decode(Partial(), 3)


def test_auto_close_on_exhausted_questions():
    target = expr.tokenize("not ( Q0 or Q1 )")
    out = decoder.decode(decoder.make_replay_scorer(target), 2, decoder.STRICT)
    assert out == target


def test_trace_format():
    trace = []
    decoder.decode(decoder.make_replay_scorer(expr.tokenize("Q0 and Q1")), 2,
                   decoder.STRICT, trace)
    assert trace[0].split("\t") == ["0", "ExpectTerm", "0", "Q0,Q1",
                                    "Q0,Q1,not,(", "Q0"]
    assert len(trace) == 3


def test_trace_marks_auto_close():
    trace = []
    decoder.decode(decoder.make_replay_scorer(expr.tokenize("( Q0 or Q1 )")), 2,
                   decoder.STRICT, trace)
    auto = [line for line in trace if line.split("\t")[4] == "-"]
    assert len(auto) == 1 and auto[0].split("\t")[5] == ")"


def test_accepts():
    assert decoder.accepts(expr.tokenize("Q0 and not Q1"), [0, 1])
    assert not decoder.accepts(expr.tokenize("Q0 not Q1"), [0, 1])
    assert not decoder.accepts(expr.tokenize("Q0"), [0, 1])  # Q1 unused
    assert decoder.accepts(expr.tokenize("not not Q0"), [0])  # strict replay


def test_termination_bound_random():
    # generous linear bound; every decode must stop well inside it
    for n in range(1, 7):
        for seed in range(100):
            tokens = _decode_random(n, seed)
            assert len(tokens) <= (2 * 3 + 6) * n + 16


# --- mask minimality ---------------------------------------------------------

def _reachable_states(n, config):
    """All (phase, balance, unused) states reachable from the start, with one
    witness prefix each."""
    start = decoder.initial_state(n)
    seen = {(start.phase, start.balance, start.unused): start}
    frontier = [start]
    while frontier:
        state = frontier.pop()
        for token in decoder.valid_tokens(state, config):
            nxt = decoder.next_state(state, token, config)
            key = (nxt.phase, nxt.balance, nxt.unused)
            if key not in seen:
                seen[key] = nxt
                frontier.append(nxt)
    return list(seen.values())


def _completion_exists(state, config, budget=16):
    """Depth-first search for any accepting continuation."""
    if not state.unused and state.balance == 0 and state.phase == AFTER_TERM:
        return True
    if budget == 0:
        return False
    for token in decoder.valid_tokens(state, config):
        if _completion_exists(decoder.next_state(state, token, config),
                              config, budget - 1):
            return True
    # auto-close path: no mask entries left but parens still open
    if not state.unused and state.balance > 0 and state.phase == AFTER_TERM:
        return True
    return False


def _valid_sequence_language(n, config, max_len=40):
    """Every complete expression over exactly questions 0..n-1 that the
    independent oracle accepts and that satisfies the config limits as
    direct sequence properties (depth cap, open budget, no double negation).
    The generating search prunes only on properties read off the grammar and
    the config, never on the decoder's own mask."""
    from test_expr import _adjacency_ok

    accepted = []
    vocab = list(range(n)) + [expr.AND, expr.OR, expr.NOT, expr.OPEN, expr.CLOSE]
    # state: (sequence, balance, pending question count)
    stack = [((), 0, n)]
    while stack:
        seq, balance, pending = stack.pop()
        if (seq and balance == 0 and pending == 0
                and oracle_is_valid(list(seq), range(n))):
            accepted.append(seq)
        if len(seq) == max_len:
            continue
        prev = seq[-1] if seq else None
        for token in vocab:
            if not _adjacency_ok(prev, token):
                continue
            if expr.is_question(token):
                if token in seq:
                    continue
                stack.append((seq + (token,), balance, pending - 1))
            elif token == expr.OPEN:
                # every group must still receive >= 2 fresh questions
                # (budget rule) and stay within the depth cap
                if balance >= config.max_nesting_depth:
                    continue
                if config.max_open_budget_rule and pending < 2:
                    continue
                stack.append((seq + (token,), balance + 1, pending))
            elif token == expr.CLOSE:
                if balance == 0:
                    continue
                stack.append((seq + (token,), balance - 1, pending))
            elif token == expr.NOT:
                if prev == expr.NOT and not config.allow_double_negation:
                    continue
                stack.append((seq + (token,), balance, pending))
            else:  # and / or need a fresh question for their right side
                if pending == 0:
                    continue
                stack.append((seq + (token,), balance, pending))
    # headroom check: nothing near the cap, so the language is complete
    assert max(len(s) for s in accepted) <= max_len - 4
    return accepted


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mask_minimality_exhaustive(n):
    """At every reachable state, the mask is exactly the set of tokens that
    can still lead to an accepted expression under the config."""
    config = decoder.DecodeConfig()
    language = _valid_sequence_language(n, config)
    prefixes = {seq[:k] for seq in language for k in range(1, len(seq) + 1)}
    vocab = list(range(n)) + [expr.AND, expr.OR, expr.NOT, expr.OPEN, expr.CLOSE]
    for state in _reachable_states(n, config):
        offered = set(decoder.valid_tokens(state, config))
        if not state.unused:
            # decode() switches to auto-closing here; mask is empty by design
            assert not offered or offered <= {expr.CLOSE}
            continue
        for token in vocab:
            can_extend = state.emitted + (token,) in prefixes
            assert (token in offered) == can_extend, (
                f"state={state} token={expr.token_text(token)} "
                f"offered={token in offered} extendable={can_extend}")
        # and no offered token is a dead end for the decoder itself
        for token in offered:
            assert _completion_exists(decoder.next_state(state, token, config), config)
