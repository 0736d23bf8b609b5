"""Pure-Python kernels for the decoding automaton.

Mirrors the compiled ``_fsa`` extension exactly; see ``kernels/__init__``
for backend selection. Token ids follow ``polich.expr`` (Q0..Q9 = 0..9,
then AND, OR, NOT, OPEN, CLOSE). Question sets travel as bitmasks.
"""

from __future__ import annotations

BACKEND = "pure"

EXPECT_TERM = 0
AFTER_NOT = 1
AFTER_TERM = 2
DONE = 3

_AND = 10
_OR = 11
_NOT = 12
_OPEN = 13
_CLOSE = 14


def valid_mask(phase: int, balance: int, unused_mask: int,
               allow_double_negation: bool, open_budget_rule: bool,
               max_nesting_depth: int, strict_replay: bool) -> int:
    """Bitmask of tokens that may be emitted from this automaton state."""
    if phase == AFTER_TERM:
        mask = 0
        if unused_mask:
            mask |= (1 << _AND) | (1 << _OR)
        if balance > 0:
            mask |= 1 << _CLOSE
        return mask
    if phase == DONE or not unused_mask:
        return 0
    mask = unused_mask
    if phase == EXPECT_TERM or allow_double_negation or strict_replay:
        mask |= 1 << _NOT
    if strict_replay or (balance < max_nesting_depth
                         and (not open_budget_rule or unused_mask.bit_count() >= 2)):
        mask |= 1 << _OPEN
    return mask


def step(phase: int, balance: int, unused_mask: int, token: int) -> tuple[int, int, int]:
    """Apply one token; returns (phase, balance, unused_mask). No legality check."""
    if token < 10:
        return AFTER_TERM, balance, unused_mask & ~(1 << token)
    if token == _NOT:
        return AFTER_NOT, balance, unused_mask
    if token == _OPEN:
        return EXPECT_TERM, balance + 1, unused_mask
    if token == _CLOSE:
        return AFTER_TERM, balance - 1, unused_mask
    return EXPECT_TERM, balance, unused_mask  # AND / OR


def accepts(tokens, unused_mask: int) -> bool:
    """Strict-mode automaton run: True iff the whole sequence is a complete
    expression consuming exactly the questions in ``unused_mask``."""
    phase = EXPECT_TERM
    balance = 0
    for token in tokens:
        mask = valid_mask(phase, balance, unused_mask, True, False, 0, True)
        if not (mask >> token) & 1:
            return False
        phase, balance, unused_mask = step(phase, balance, unused_mask, token)
    return phase == AFTER_TERM and balance == 0 and unused_mask == 0
