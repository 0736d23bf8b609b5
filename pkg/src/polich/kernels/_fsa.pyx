# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels for the decoding automaton (twin of ``_pure``)."""

BACKEND = "compiled"

EXPECT_TERM = 0
AFTER_NOT = 1
AFTER_TERM = 2
DONE = 3

cdef int C_EXPECT_TERM = 0
cdef int C_AFTER_NOT = 1
cdef int C_AFTER_TERM = 2
cdef int C_DONE = 3

cdef int T_AND = 10
cdef int T_OR = 11
cdef int T_NOT = 12
cdef int T_OPEN = 13
cdef int T_CLOSE = 14


cdef inline int _popcount(unsigned int x) noexcept:
    cdef int count = 0
    while x:
        x &= x - 1
        count += 1
    return count


cdef inline int _mask(int phase, int balance, unsigned int unused_mask,
                      bint allow_double_negation, bint open_budget_rule,
                      int max_nesting_depth, bint strict_replay) noexcept:
    cdef int mask = 0
    if phase == C_AFTER_TERM:
        if unused_mask:
            mask |= (1 << T_AND) | (1 << T_OR)
        if balance > 0:
            mask |= 1 << T_CLOSE
        return mask
    if phase == C_DONE or unused_mask == 0:
        return 0
    mask = unused_mask
    if phase == C_EXPECT_TERM or allow_double_negation or strict_replay:
        mask |= 1 << T_NOT
    if strict_replay or (balance < max_nesting_depth
                         and (not open_budget_rule or _popcount(unused_mask) >= 2)):
        mask |= 1 << T_OPEN
    return mask


def valid_mask(int phase, int balance, unsigned int unused_mask,
               bint allow_double_negation, bint open_budget_rule,
               int max_nesting_depth, bint strict_replay):
    """Bitmask of tokens that may be emitted from this automaton state."""
    return _mask(phase, balance, unused_mask, allow_double_negation,
                 open_budget_rule, max_nesting_depth, strict_replay)


def step(int phase, int balance, unsigned int unused_mask, int token):
    """Apply one token; returns (phase, balance, unused_mask). No legality check."""
    if token < 10:
        return C_AFTER_TERM, balance, unused_mask & ~(1 << token)
    if token == T_NOT:
        return C_AFTER_NOT, balance, unused_mask
    if token == T_OPEN:
        return C_EXPECT_TERM, balance + 1, unused_mask
    if token == T_CLOSE:
        return C_AFTER_TERM, balance - 1, unused_mask
    return C_EXPECT_TERM, balance, unused_mask


def accepts(tokens, unsigned int unused_mask):
    """Strict-mode automaton run: True iff the whole sequence is a complete
    expression consuming exactly the questions in ``unused_mask``."""
    cdef int phase = C_EXPECT_TERM
    cdef int balance = 0
    cdef int token
    cdef int mask
    for token in tokens:
        mask = _mask(phase, balance, unused_mask, True, False, 0, True)
        if not (mask >> token) & 1:
            return False
        if token < 10:
            unused_mask &= ~(1 << token)
            phase = C_AFTER_TERM
        elif token == T_NOT:
            phase = C_AFTER_NOT
        elif token == T_OPEN:
            balance += 1
            phase = C_EXPECT_TERM
        elif token == T_CLOSE:
            balance -= 1
            phase = C_AFTER_TERM
        else:
            phase = C_EXPECT_TERM
    return phase == C_AFTER_TERM and balance == 0 and unused_mask == 0
