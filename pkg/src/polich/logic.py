"""Semantics of expression trees.

Truth tables and logical equivalence, three-valued (strong Kleene)
evaluation for scenarios with unanswerable questions, canonical forms,
equivalence-preserving rewrites, and exhaustive enumeration of read-once
trees over a fixed question set.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import MissingAnswerError, NoDistinctEquivalentError
from .expr import And, Leaf, Not, Or, Tree, question_set, serialize, tree_text

# bool | None with None meaning "unknown"; False < Unknown < True.
TruthValue = bool | None

_KLEENE_RANK = {False: 0, None: 1, True: 2}


@dataclass(frozen=True)
class TruthTable:
    """The Boolean function of a tree, one bit per assignment.

    Row order is binary counting over the tree's questions in ascending id
    order, the lowest id being the most significant position; row 0 is the
    all-false assignment.
    """

    num_questions: int
    bits: tuple[bool, ...]

    def __post_init__(self):
        if len(self.bits) != 1 << self.num_questions:
            raise ValueError("truth table length must be 2**num_questions")

    def to_bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


@functools.lru_cache(maxsize=None)
def _variable_columns(n: int) -> tuple[int, ...]:
    """Bit-parallel columns: column j has bit i set iff, in row i, the j-th
    variable (ascending id order) is true."""
    rows = 1 << n
    cols = []
    for j in range(n):
        col = 0
        for i in range(rows):
            if (i >> (n - 1 - j)) & 1:
                col |= 1 << i
        cols.append(col)
    return tuple(cols)


def truth_table(tree: Tree) -> TruthTable:
    variables = sorted(question_set(tree))
    n = len(variables)
    position = {q: j for j, q in enumerate(variables)}
    cols = _variable_columns(n)
    full = (1 << (1 << n)) - 1

    def run(node: Tree) -> int:
        if isinstance(node, Leaf):
            return cols[position[node.index]]
        if isinstance(node, Not):
            return full ^ run(node.child)
        value = run(node.children[0])
        if isinstance(node, And):
            for child in node.children[1:]:
                value &= run(child)
        else:
            for child in node.children[1:]:
                value |= run(child)
        return value

    bits = run(tree)
    return TruthTable(n, tuple(bool((bits >> i) & 1) for i in range(1 << n)))


def evaluate(tree: Tree, answers: Mapping[int, TruthValue]) -> TruthValue:
    """Strong Kleene evaluation: and = min, or = max, not swaps True/False
    and fixes Unknown. Raises MissingAnswerError for uncovered questions."""
    if isinstance(tree, Leaf):
        if tree.index not in answers:
            raise MissingAnswerError(tree.index)
        return answers[tree.index]
    if isinstance(tree, Not):
        value = evaluate(tree.child, answers)
        return None if value is None else not value
    values = [evaluate(child, answers) for child in tree.children]
    pick = min if isinstance(tree, And) else max
    return pick(values, key=_KLEENE_RANK.__getitem__)


def equivalent(t1: Tree, t2: Tree) -> bool:
    """True iff both trees mention the same questions and have equal truth
    tables. Trees over different question sets are never equivalent."""
    if question_set(t1) != question_set(t2):
        return False
    return truth_table(t1).bits == truth_table(t2).bits


def identical(t1: Tree, t2: Tree) -> bool:
    """Serialize-normalized syntactic equality."""
    return serialize(t1) == serialize(t2)


def _min_question(tree: Tree) -> int:
    return min(question_set(tree))


def canonicalize(tree: Tree) -> Tree:
    """Collapse double negation, flatten nested same-operator nodes and sort
    children by lowest contained question id. Idempotent and
    equivalence-preserving."""
    if isinstance(tree, Leaf):
        return tree
    if isinstance(tree, Not):
        child = canonicalize(tree.child)
        return child.child if isinstance(child, Not) else Not(child)
    cls = And if isinstance(tree, And) else Or
    flat: list[Tree] = []
    for child in tree.children:
        child = canonicalize(child)
        if isinstance(child, cls):
            flat.extend(child.children)
        else:
            flat.append(child)
    flat.sort(key=_min_question)
    return cls(tuple(flat))


# --- exhaustive enumeration -------------------------------------------------

def _set_partitions(items: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    """All set partitions of ``items``; blocks come out sorted by minimum."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partial in _set_partitions(rest):
        for i in range(len(partial)):
            yield partial[:i] + [(first,) + partial[i]] + partial[i + 1:]
        yield [(first,)] + partial


def _iter_positive(variables: tuple[int, ...]) -> Iterator[Tree]:
    """Canonical trees over exactly ``variables`` whose root is not Not."""
    if len(variables) == 1:
        yield Leaf(variables[0])
        return
    for cls in (And, Or):
        for blocks in _set_partitions(variables):
            if len(blocks) < 2:
                continue
            blocks = sorted(blocks, key=min)
            choices = [[t for t in _iter_trees(b) if not isinstance(t, cls)]
                       for b in blocks]
            for children in _product(choices):
                yield cls(tuple(children))


def _product(choices: list[list[Tree]]) -> Iterator[tuple[Tree, ...]]:
    if not choices:
        yield ()
        return
    for head in choices[0]:
        for tail in _product(choices[1:]):
            yield (head,) + tail


def _iter_trees(variables: tuple[int, ...]) -> Iterator[Tree]:
    for tree in _iter_positive(variables):
        yield tree
        yield Not(tree)


def iter_trees(n: int) -> Iterator[Tree]:
    """Lazily yield every canonical read-once tree over exactly Q0..Q(n-1)
    (no double negation)."""
    if not 1 <= n <= 6:
        raise ValueError("enumeration supports 1 <= n <= 6")
    return _iter_trees(tuple(range(n)))


def enumerate_trees(n: int, dedup: str = "syntactic") -> list[Tree]:
    """All canonical trees over Q0..Q(n-1).

    With dedup="equivalence_class", one representative per truth table is
    kept (the serialization-least member). Beware: the syntactic space for
    n=6 runs to tens of millions of trees; prefer ``iter_trees`` there.
    """
    if dedup == "syntactic":
        return list(iter_trees(n))
    if dedup != "equivalence_class":
        raise ValueError(f"unknown dedup mode {dedup!r}")
    representatives: dict[tuple[bool, ...], Tree] = {}
    for tree in iter_trees(n):
        key = truth_table(tree).bits
        best = representatives.get(key)
        if best is None or tree_text(tree) < tree_text(best):
            representatives[key] = tree
    return sorted(representatives.values(), key=tree_text)


# --- uniform sampling over the syntactic space -------------------------------

@functools.lru_cache(maxsize=None)
def _count_op_rooted(n: int) -> int:
    """Number of canonical And-rooted trees over an n-variable set (equal to
    the Or-rooted count by symmetry)."""
    if n == 1:
        return 0
    total = 0
    for blocks in _set_partitions(tuple(range(n))):
        if len(blocks) < 2:
            continue
        prod = 1
        for block in blocks:
            prod *= _count_not_op_rooted(len(block))
        total += prod
    return total


def _count_positive(n: int) -> int:
    return (1 if n == 1 else 0) + 2 * _count_op_rooted(n)


def count_trees(n: int) -> int:
    """Size of the canonical syntactic space for exactly n questions."""
    return 2 * _count_positive(n)


def _count_not_op_rooted(n: int) -> int:
    # children admissible under an And node: leaf, Or-rooted or Not-rooted
    return count_trees(n) - _count_op_rooted(n)


def _weighted_choice(rng: random.Random, weights: list[int]) -> int:
    total = sum(weights)
    pick = rng.randrange(total)
    for i, w in enumerate(weights):
        if pick < w:
            return i
        pick -= w
    raise AssertionError("unreachable")


def sample_tree(n: int, rng: random.Random) -> Tree:
    """Uniform draw over the canonical syntactic space for n questions."""
    if not 1 <= n <= 6:
        raise ValueError("sampling supports 1 <= n <= 6")
    positive = _sample_positive(tuple(range(n)), rng)
    return Not(positive) if rng.random() < 0.5 else positive


def _sample_positive(variables: tuple[int, ...], rng: random.Random) -> Tree:
    if len(variables) == 1:
        return Leaf(variables[0])
    cls = And if rng.random() < 0.5 else Or
    partitions = [sorted(blocks, key=min)
                  for blocks in _set_partitions(variables) if len(blocks) >= 2]
    weights = []
    for blocks in partitions:
        prod = 1
        for block in blocks:
            prod *= _count_not_op_rooted(len(block))
        weights.append(prod)
    blocks = partitions[_weighted_choice(rng, weights)]
    children = tuple(_sample_child(tuple(b), cls, rng) for b in blocks)
    return cls(children)


def _sample_child(variables: tuple[int, ...], parent_cls: type, rng: random.Random) -> Tree:
    """Sample a tree over ``variables`` whose root is not ``parent_cls``."""
    m = len(variables)
    leaf_w = 1 if m == 1 else 0
    other_op_w = _count_op_rooted(m)
    not_w = _count_positive(m)
    choice = _weighted_choice(rng, [leaf_w, other_op_w, not_w])
    if choice == 0:
        return Leaf(variables[0])
    if choice == 1:
        other = Or if parent_cls is And else And
        # rejection-free: steer _sample_positive to the other operator
        tree = _sample_positive_with_op(variables, other, rng)
        return tree
    return Not(_sample_positive(variables, rng))


def _sample_positive_with_op(variables: tuple[int, ...], cls: type,
                             rng: random.Random) -> Tree:
    partitions = [sorted(blocks, key=min)
                  for blocks in _set_partitions(variables) if len(blocks) >= 2]
    weights = []
    for blocks in partitions:
        prod = 1
        for block in blocks:
            prod *= _count_not_op_rooted(len(block))
        weights.append(prod)
    blocks = partitions[_weighted_choice(rng, weights)]
    return cls(tuple(_sample_child(tuple(b), cls, rng) for b in blocks))


# --- equivalence-preserving rewrites -----------------------------------------

Path = tuple[int, ...]


def _nodes_with_paths(tree: Tree, path: Path = ()) -> Iterator[tuple[Path, Tree]]:
    yield path, tree
    if isinstance(tree, Not):
        yield from _nodes_with_paths(tree.child, path + (0,))
    elif isinstance(tree, (And, Or)):
        for i, child in enumerate(tree.children):
            yield from _nodes_with_paths(child, path + (i,))


def _replace_at(tree: Tree, path: Path, new: Tree) -> Tree:
    if not path:
        return new
    head, rest = path[0], path[1:]
    if isinstance(tree, Not):
        return Not(_replace_at(tree.child, rest, new))
    children = list(tree.children)
    children[head] = _replace_at(children[head], rest, new)
    cls = And if isinstance(tree, And) else Or
    return cls(tuple(children))


def _negated(tree: Tree) -> Tree:
    return tree.child if isinstance(tree, Not) else Not(tree)


def _rewrite_options(tree: Tree) -> list[tuple[Path, Tree]]:
    """Every single-step rewrite applicable anywhere in the tree."""
    options: list[tuple[Path, Tree]] = []
    for path, node in _nodes_with_paths(tree):
        if isinstance(node, Not) and isinstance(node.child, (And, Or)):
            inner = node.child
            flipped = Or if isinstance(inner, And) else And
            options.append(
                (path, flipped(tuple(_negated(c) for c in inner.children))))
        if isinstance(node, (And, Or)):
            cls = And if isinstance(node, And) else Or
            flipped = Or if isinstance(node, And) else And
            # De Morgan inward: a and b -> not (not a or not b)
            options.append(
                (path, Not(flipped(tuple(_negated(c) for c in node.children)))))
            # child permutations (rotate by one; enough to be non-identity)
            rotated = node.children[1:] + node.children[:1]
            options.append((path, cls(rotated)))
            # regroup: fold the first two children of a wide node
            if len(node.children) >= 3:
                grouped = (cls(node.children[:2]),) + node.children[2:]
                options.append((path, cls(grouped)))
            # flatten a nested same-operator child
            for i, child in enumerate(node.children):
                if isinstance(child, cls) and len(node.children) >= 2:
                    merged = (node.children[:i] + child.children
                              + node.children[i + 1:])
                    options.append((path, cls(merged)))
    return options


def _has_binary_node(tree: Tree) -> bool:
    return any(isinstance(node, (And, Or)) for _, node in _nodes_with_paths(tree))


def rewrite_equivalent(tree: Tree, seed: int) -> Tree:
    """A logically equivalent but syntactically different tree, produced by a
    seeded random chain of sound, variable-preserving rewrites.

    Raises NoDistinctEquivalentError when the input has no non-identical
    equivalent in this language ("Q0", "not Q0").
    """
    if not _has_binary_node(tree):
        raise NoDistinctEquivalentError(tree_text(tree))
    rng = random.Random(seed)
    result = tree
    for _ in range(1 + rng.randrange(3)):
        options = _rewrite_options(result)
        path, replacement = options[rng.randrange(len(options))]
        result = _replace_at(result, path, replacement)
    if identical(result, tree):
        # force a visible change: rotate the children of some binary node
        for path, node in _nodes_with_paths(result):
            if isinstance(node, (And, Or)):
                cls = And if isinstance(node, And) else Or
                rotated = cls(node.children[1:] + node.children[:1])
                result = _replace_at(result, path, rotated)
                break
    return result


def dedup_by_equivalence(trees: Iterable[Tree]) -> list[Tree]:
    """One canonical representative per truth-table class, in first-seen
    order; representatives are canonicalized."""
    seen: dict[tuple[int, tuple[bool, ...]], Tree] = {}
    for tree in trees:
        table = truth_table(tree)
        key = (table.num_questions, table.bits)
        if key not in seen:
            seen[key] = canonicalize(tree)
    return list(seen.values())
