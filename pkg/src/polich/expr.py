"""Tokenization, parsing and serialization of the infix expression-tree language.

Expressions are read-once propositional formulas over question identifiers
Q0..Q9 with operators ``and``, ``or``, ``not`` and parentheses. Precedence is
``not`` > ``and`` > ``or``; binary operators are left-associative and
same-operator chains flatten into n-ary nodes. Tokens are small integers so
they can be handed to the compiled kernels directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .errors import DuplicateQuestionError, ExprSyntaxError, UnknownTokenError

# Token ids. Q0..Q9 are 0..9; the order doubles as the decoder tie-break order.
MAX_QUESTIONS = 10
AND = 10
OR = 11
NOT = 12
OPEN = 13
CLOSE = 14
BOS = 15
EOS = 16

TOKEN_ORDER = tuple(range(CLOSE + 1))

_PLAIN_TEXT = {AND: "and", OR: "or", NOT: "not", OPEN: "(", CLOSE: ")",
               BOS: "[BOS]", EOS: "[EOS]"}
_BRACKET_TEXT = {AND: "[AND]", OR: "[OR]", NOT: "[NOT]", OPEN: "[BR]",
                 CLOSE: "[/BR]", BOS: "[BOS]", EOS: "[EOS]"}

_WORD_TO_TOKEN: dict[str, int] = {}
for _i in range(MAX_QUESTIONS):
    _WORD_TO_TOKEN[f"q{_i}"] = _i
    _WORD_TO_TOKEN[f"[q{_i}]"] = _i
for _tok, _word in _PLAIN_TEXT.items():
    _WORD_TO_TOKEN[_word.lower()] = _tok
for _tok, _word in _BRACKET_TEXT.items():
    _WORD_TO_TOKEN[_word.lower()] = _tok


def is_question(token: int) -> bool:
    return 0 <= token < MAX_QUESTIONS


def token_text(token: int, style: str = "plain") -> str:
    """Surface spelling of one token. ``style`` is "plain" or "bracket"."""
    if is_question(token):
        return f"[Q{token}]" if style == "bracket" else f"Q{token}"
    table = _BRACKET_TEXT if style == "bracket" else _PLAIN_TEXT
    return table[token]


def to_text(tokens: Iterable[int], style: str = "plain") -> str:
    return " ".join(token_text(t, style) for t in tokens)


def tokenize(text: str) -> list[int]:
    """Split whitespace-separated surface forms into token ids.

    Accepts both the plain spelling ("Q0 and not Q1") and the bracketed
    special-token spelling ("[Q0] [AND] [NOT] [Q1]"), case-insensitively.
    Parentheses need not be whitespace-separated: "(Q0 or Q1)" works.

    Raises:
        UnknownTokenError: for any word outside the vocabulary.
    """
    tokens = []
    spaced = text.replace("(", " ( ").replace(")", " ) ")
    for position, word in enumerate(spaced.split()):
        token = _WORD_TO_TOKEN.get(word.lower())
        if token is None:
            raise UnknownTokenError(word, position)
        tokens.append(token)
    return tokens


@dataclass(frozen=True)
class Leaf:
    index: int

    def __post_init__(self):
        if not 0 <= self.index < MAX_QUESTIONS:
            raise ValueError(f"question index {self.index} out of range")


@dataclass(frozen=True)
class Not:
    child: "Tree"


@dataclass(frozen=True)
class And:
    children: tuple["Tree", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("And node needs at least two children")


@dataclass(frozen=True)
class Or:
    children: tuple["Tree", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Or node needs at least two children")


Tree = Union[Leaf, Not, And, Or]


def questions(tree: Tree) -> list[int]:
    """Question indices in left-to-right order of appearance."""
    out: list[int] = []

    def walk(node: Tree) -> None:
        if isinstance(node, Leaf):
            out.append(node.index)
        elif isinstance(node, Not):
            walk(node.child)
        else:
            for child in node.children:
                walk(child)

    walk(tree)
    return out


def question_set(tree: Tree) -> frozenset[int]:
    return frozenset(questions(tree))


def validate_tree(tree: Tree) -> None:
    """Check the read-once invariant; raises DuplicateQuestionError."""
    seen: set[int] = set()
    for q in questions(tree):
        if q in seen:
            raise DuplicateQuestionError(q)
        seen.add(q)


class _Parser:
    """Recursive-descent parser over a token-id list."""

    def __init__(self, tokens: list[int]):
        self.tokens = tokens
        self.pos = 0
        self.seen: set[int] = set()

    def peek(self) -> int | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> int:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, message: str) -> ExprSyntaxError:
        return ExprSyntaxError(f"{message} at position {self.pos}")

    def parse_or(self) -> Tree:
        parts = [self.parse_and()]
        while self.peek() == OR:
            self.advance()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self) -> Tree:
        parts = [self.parse_unary()]
        while self.peek() == AND:
            self.advance()
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_unary(self) -> Tree:
        if self.peek() == NOT:
            self.advance()
            return Not(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Tree:
        token = self.peek()
        if token is None:
            raise self.fail("unexpected end of expression")
        if is_question(token):
            self.advance()
            if token in self.seen:
                raise DuplicateQuestionError(token)
            self.seen.add(token)
            return Leaf(token)
        if token == OPEN:
            self.advance()
            inner = self.parse_or()
            if self.peek() != CLOSE:
                raise self.fail("expected ')'")
            self.advance()
            return inner
        raise self.fail(f"unexpected token {token_text(token)!r}")


def parse(tokens: list[int]) -> Tree:
    """Build the AST for a token sequence.

    A leading BOS and trailing EOS are tolerated and stripped. Raises
    ExprSyntaxError on malformed input and DuplicateQuestionError when a
    question identifier occurs twice.
    """
    stripped = list(tokens)
    if stripped and stripped[0] == BOS:
        stripped = stripped[1:]
    if stripped and stripped[-1] == EOS:
        stripped = stripped[:-1]
    if BOS in stripped or EOS in stripped:
        raise ExprSyntaxError("BOS/EOS only allowed at sequence boundaries")
    if not stripped:
        raise ExprSyntaxError("empty expression")
    parser = _Parser(stripped)
    tree = parser.parse_or()
    if parser.pos != len(stripped):
        raise parser.fail(f"trailing token {token_text(stripped[parser.pos])!r}")
    return tree


def parse_text(text: str) -> Tree:
    return parse(tokenize(text))


def serialize(tree: Tree) -> list[int]:
    """Emit infix tokens with the minimal parentheses needed.

    Parentheses are emitted only where reparsing would otherwise regroup:
    an Or child of And/Or, an And child of And, and And/Or children of Not.
    parse(serialize(t)) reconstructs t exactly.
    """
    out: list[int] = []

    def emit(node: Tree, parenthesize: bool) -> None:
        if parenthesize:
            out.append(OPEN)
        if isinstance(node, Leaf):
            out.append(node.index)
        elif isinstance(node, Not):
            out.append(NOT)
            emit(node.child, isinstance(node.child, (And, Or)))
        elif isinstance(node, And):
            for i, child in enumerate(node.children):
                if i:
                    out.append(AND)
                emit(child, isinstance(child, (And, Or)))
        else:
            for i, child in enumerate(node.children):
                if i:
                    out.append(OR)
                emit(child, isinstance(child, Or))
        if parenthesize:
            out.append(CLOSE)

    emit(tree, False)
    return out


def tree_text(tree: Tree, style: str = "plain") -> str:
    return to_text(serialize(tree), style)


def is_valid(text: str) -> bool:
    """True iff the text tokenizes and parses as a read-once expression."""
    try:
        parse_text(text)
        return True
    except (UnknownTokenError, ExprSyntaxError):
        return False
