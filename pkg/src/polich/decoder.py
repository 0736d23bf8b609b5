"""Greedy constrained decoding with a finite state automaton.

At every step the automaton masks tokens that cannot extend to a valid
read-once expression; the scorer only ever sees legal candidates, so any
scorer (including an adversarial one) yields a valid tree. When the last
question has been emitted, dangling open parentheses are closed
automatically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Protocol, Sequence

from . import kernels
from .errors import BadConfigError, IllegalTransitionError, ScorerFailureError
from .expr import CLOSE, MAX_QUESTIONS, NOT, OPEN, is_question, token_text

PHASE_NAMES = {
    kernels.EXPECT_TERM: "ExpectTerm",
    kernels.AFTER_NOT: "ExpectTermAfterNot",
    kernels.AFTER_TERM: "AfterTerm",
    kernels.DONE: "Done",
}


@dataclass(frozen=True)
class DecodeConfig:
    """Knobs for the masking heuristics.

    ``strict_replay`` disables the open-parenthesis budget and the nesting
    cap (and permits double negation) so that every parser-valid sequence
    can be replayed exactly.
    """

    allow_double_negation: bool = False
    max_open_budget_rule: bool = True
    max_nesting_depth: int = 3
    strict_replay: bool = False

    def __post_init__(self):
        if self.max_nesting_depth < 1:
            raise BadConfigError("max_nesting_depth must be >= 1")


STRICT = DecodeConfig(strict_replay=True)


@dataclass(frozen=True)
class DecoderState:
    phase: int
    balance: int
    unused: frozenset[int]
    emitted: tuple[int, ...] = ()

    @property
    def unused_mask(self) -> int:
        mask = 0
        for q in self.unused:
            mask |= 1 << q
        return mask


def initial_state(question_count: int) -> DecoderState:
    if not 1 <= question_count <= MAX_QUESTIONS:
        raise BadConfigError(
            f"question_count must be in [1, {MAX_QUESTIONS}], got {question_count}")
    return DecoderState(kernels.EXPECT_TERM, 0, frozenset(range(question_count)))


def valid_tokens(state: DecoderState, config: DecodeConfig = DecodeConfig()) -> list[int]:
    """Legal continuations of ``state``, in the fixed tie-break order
    (question ids ascending, then and, or, not, open, close)."""
    mask = kernels.valid_mask(
        state.phase, state.balance, state.unused_mask,
        config.allow_double_negation, config.max_open_budget_rule,
        config.max_nesting_depth, config.strict_replay)
    return [t for t in range(CLOSE + 1) if (mask >> t) & 1]


def next_state(state: DecoderState, token: int,
               config: DecodeConfig = STRICT) -> DecoderState:
    """Deterministic transition; raises IllegalTransitionError when the token
    is not offered by ``valid_tokens(state, config)``."""
    if token not in valid_tokens(state, config):
        raise IllegalTransitionError(
            f"token {token_text(token)!r} illegal in phase "
            f"{PHASE_NAMES[state.phase]} (balance {state.balance})")
    phase, balance, _ = kernels.step(state.phase, state.balance, state.unused_mask, token)
    unused = state.unused - {token} if is_question(token) else state.unused
    return DecoderState(phase, balance, unused, state.emitted + (token,))


class TokenScorer(Protocol):
    def score(self, prefix: Sequence[int], candidates: Sequence[int]) -> dict[int, float]:
        """Score every candidate; higher wins. Masking happens outside."""
        ...


@dataclass
class ReplayScorer:
    """Oracle scorer: +1 for the target's token at the current position,
    0 for everything else; all zeros once the target is exhausted."""

    target: tuple[int, ...]

    def score(self, prefix, candidates):
        pos = len(prefix)
        wanted = self.target[pos] if pos < len(self.target) else None
        return {c: 1.0 if c == wanted else 0.0 for c in candidates}


class UniformScorer:
    """All candidates score equally; the tie-break order decides."""

    def score(self, prefix, candidates):
        return {c: 0.0 for c in candidates}


@dataclass
class RandomScorer:
    """Seeded random scores, for soundness stress tests."""

    seed: int
    _rng: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        self._rng = random.Random(self.seed)

    def score(self, prefix, candidates):
        return {c: self._rng.random() for c in candidates}


def make_replay_scorer(target: Iterable[int]) -> ReplayScorer:
    return ReplayScorer(tuple(target))


def _trace_line(step_index: int, state: DecoderState, candidates: list[int] | None,
                chosen: int) -> str:
    unused = ",".join(f"Q{q}" for q in sorted(state.unused)) or "-"
    cands = ",".join(token_text(c) for c in candidates) if candidates else "-"
    return "\t".join([str(step_index), PHASE_NAMES[state.phase], str(state.balance),
                      unused, cands, token_text(chosen)])


def decode(scorer: TokenScorer, question_count: int,
           config: DecodeConfig = DecodeConfig(),
           trace: list[str] | None = None) -> list[int]:
    """Greedy constrained decode.

    Loops until every question id has been emitted, then auto-closes any
    remaining open parentheses. The result always parses as a valid tree
    using each of Q0..Q(question_count-1) exactly once.
    """
    state = initial_state(question_count)
    # Generous safety net; the real length bound is asserted in tests.
    max_steps = (2 * config.max_nesting_depth + 6) * question_count + 16
    step_index = 0
    while state.unused:
        if step_index > max_steps and not config.strict_replay:
            raise RuntimeError("decode exceeded its step budget")
        candidates = valid_tokens(state, config)
        scores = scorer.score(list(state.emitted), candidates)
        missing = [c for c in candidates if c not in scores]
        if missing:
            raise ScorerFailureError(
                f"scorer returned no score for {[token_text(c) for c in missing]}")
        chosen = max(candidates, key=lambda c: (scores[c], -c))
        if trace is not None:
            trace.append(_trace_line(step_index, state, candidates, chosen))
        state = next_state(state, chosen, config)
        step_index += 1
    while state.balance > 0:
        if trace is not None:
            trace.append(_trace_line(step_index, state, None, CLOSE))
        state = replace(state, balance=state.balance - 1,
                        emitted=state.emitted + (CLOSE,))
        step_index += 1
    return list(state.emitted)


def accepts(tokens: Sequence[int], question_ids: Iterable[int]) -> bool:
    """Strict-mode automaton membership: does ``tokens`` form a complete
    expression consuming exactly ``question_ids``?"""
    mask = 0
    for q in question_ids:
        mask |= 1 << q
    return kernels.accepts(list(tokens), mask)
