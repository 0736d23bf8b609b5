"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PolichError(Exception):
    """Base class for all errors raised by this package."""


class UnknownTokenError(PolichError):
    def __init__(self, word: str, position: int):
        super().__init__(f"unknown token {word!r} at position {position}")
        self.word = word
        self.position = position


class ExprSyntaxError(PolichError):
    """Malformed expression: unbalanced parentheses, adjacent terms, etc."""


class DuplicateQuestionError(ExprSyntaxError):
    def __init__(self, index: int):
        super().__init__(f"question Q{index} occurs more than once")
        self.index = index


class IllegalTransitionError(PolichError):
    """Token fed to the automaton is not valid in the current state."""


class ScorerFailureError(PolichError):
    """Scorer did not return a score for every candidate token."""


class NoDistinctEquivalentError(PolichError):
    """Tree admits no non-identical logically equivalent rewrite."""


class NotSplittableError(PolichError):
    def __init__(self, index: int):
        super().__init__(f"question Q{index} has no top-level coordinator to split on")
        self.index = index


class CannotPruneError(PolichError):
    """Tree is a single leaf; removing its question leaves nothing."""


class EmptyCandidatesError(PolichError):
    """Ranking was invoked with an empty candidate list (skip rule applies)."""


class NoTreesForCountError(PolichError):
    def __init__(self, n: int):
        super().__init__(f"no training trees with {n} questions")
        self.n = n


class MissingAnswerError(PolichError):
    def __init__(self, index: int):
        super().__init__(f"no answer supplied for Q{index}")
        self.index = index


class SchemaError(PolichError):
    def __init__(self, line: int, field: str, message: str = ""):
        detail = f": {message}" if message else ""
        super().__init__(f"line {line}: bad field {field!r}{detail}")
        self.line = line
        self.field = field


class TreeInvalidError(PolichError):
    def __init__(self, line: int, message: str = ""):
        detail = f": {message}" if message else ""
        super().__init__(f"line {line}: invalid tree{detail}")
        self.line = line


class BadConfigError(PolichError):
    """Invalid session or decode configuration."""


class IllegalTokenError(PolichError):
    """Session step received a token outside the current mask."""


class IncompleteError(PolichError):
    """Session finish requested while question tokens remain."""


class SessionClosedError(PolichError):
    """Operation on a closed session handle."""
