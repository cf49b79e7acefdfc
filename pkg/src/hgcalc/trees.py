"""Rooted trees with labelled leaves, used to index higher products.

A tree is a nested tuple: a leaf is a positive int (its label), an internal
vertex is a tuple of at least two subtrees.  The orientation of a tree is the
preorder of its internal vertices in the given representation; each internal
vertex is an odd cell.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product
from typing import Callable, Dict, List, Sequence, Tuple, Union

Tree = Union[int, tuple]


class RootedTree:
    """Immutable wrapper around a nested-tuple tree."""

    __slots__ = ("shape",)

    def __init__(self, shape: Tree):
        _check_shape(shape)
        self.shape = shape

    @classmethod
    def parse(cls, text: str) -> "RootedTree":
        return cls(parse_tree(text))

    @classmethod
    def corolla(cls, r: int) -> "RootedTree":
        if r < 2:
            raise ValueError("a corolla needs at least 2 leaves")
        return cls(tuple(range(1, r + 1)))

    @property
    def leaf_count(self) -> int:
        return len(leaves(self.shape))

    @property
    def internal_vertex_count(self) -> int:
        return internal_count(self.shape)

    def __str__(self):
        return format_tree(self.shape)

    __repr__ = __str__

    def __eq__(self, other):
        return isinstance(other, RootedTree) and self.shape == other.shape

    def __hash__(self):
        return hash(self.shape)


def _check_shape(shape: Tree):
    labels = leaves(shape)
    if sorted(labels) != list(range(1, len(labels) + 1)):
        raise ValueError("leaves must carry the labels 1..r exactly once")

    def walk(t):
        if isinstance(t, int):
            return
        if not isinstance(t, tuple) or len(t) < 2:
            raise ValueError("internal vertices need arity >= 2")
        for c in t:
            walk(c)

    walk(shape)


def parse_tree(text: str) -> Tree:
    text = text.replace(" ", "")
    pos = 0

    def node():
        nonlocal pos
        if pos >= len(text):
            raise ValueError(f"truncated tree string {text!r}")
        if text[pos] == "(":
            pos += 1
            children = [node()]
            while pos < len(text) and text[pos] == ",":
                pos += 1
                children.append(node())
            if pos >= len(text) or text[pos] != ")":
                raise ValueError(f"malformed tree string {text!r}")
            pos += 1
            return tuple(children)
        start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if start == pos:
            raise ValueError(f"malformed tree string {text!r}")
        return int(text[start:pos])

    t = node()
    if pos != len(text):
        raise ValueError(f"trailing characters in tree string {text!r}")
    if isinstance(t, int):
        raise ValueError("a tree needs at least one internal vertex")
    _check_shape(t)
    return t


def format_tree(t: Tree, label: Callable[[int], str] = str) -> str:
    if isinstance(t, int):
        return label(t)
    return "(" + ",".join(format_tree(c, label) for c in t) + ")"


def leaves(t: Tree) -> List[int]:
    if isinstance(t, int):
        return [t]
    out: List[int] = []
    for c in t:
        out.extend(leaves(c))
    return out


def internal_count(t: Tree) -> int:
    if isinstance(t, int):
        return 0
    return 1 + sum(internal_count(c) for c in t)


def relabel(t: Tree, mapping: Dict[int, int]) -> Tree:
    if isinstance(t, int):
        return mapping[t]
    return tuple(relabel(c, mapping) for c in t)


def normalize(t: Tree) -> Tree:
    """Children sorted by smallest leaf label (a unique representative)."""
    if isinstance(t, int):
        return t
    kids = [normalize(c) for c in t]
    kids.sort(key=lambda c: min(leaves(c)))
    return tuple(kids)


def preorder_paths(t: Tree, path: Tuple[int, ...] = ()) -> List[Tuple[int, ...]]:
    """Paths (child index sequences) of internal vertices in preorder."""
    if isinstance(t, int):
        return []
    out = [path]
    for i, c in enumerate(t):
        out.extend(preorder_paths(c, path + (i,)))
    return out


def subtree(t: Tree, path: Sequence[int]) -> Tree:
    for i in path:
        t = t[i]
    return t


def replace_at(t: Tree, path: Sequence[int], new: Tree) -> Tree:
    if not path:
        return new
    i = path[0]
    kids = list(t)
    kids[i] = replace_at(kids[i], path[1:], new)
    return tuple(kids)


def contract_at(t: Tree, path: Sequence[int]) -> Tree:
    """Contract the edge from the vertex at ``path`` to its parent."""
    if not path:
        raise ValueError("the root has no parent edge")
    parent_path, i = tuple(path[:-1]), path[-1]
    parent = subtree(t, parent_path)
    child = parent[i]
    kids = list(parent[:i]) + list(child) + list(parent[i + 1:])
    return replace_at(t, parent_path, tuple(kids))


@lru_cache(maxsize=None)
def labelled_trees(r: int) -> Tuple[Tree, ...]:
    """All isomorphism classes of rooted trees with leaves 1..r (arity >= 2)."""
    if r < 2:
        return ()
    return tuple(_trees_on(tuple(range(1, r + 1)), top=True))


def _set_partitions(items: Tuple[int, ...]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [(first,)] + part
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1:]


def _trees_on(labels: Tuple[int, ...], top: bool = False) -> List[Tree]:
    if len(labels) == 1:
        return [labels[0]]
    out: List[Tree] = []
    for part in _set_partitions(labels):
        if len(part) < 2:
            continue
        blocks = sorted((tuple(sorted(b)) for b in part), key=lambda b: b[0])
        for combo in product(*(_trees_on(b) for b in blocks)):
            out.append(tuple(combo))
    out.sort(key=lambda t: (internal_count(t), format_tree(t)))
    return out


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given as a sequence of distinct comparable keys."""
    sign = 1
    seq = list(perm)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def koszul_sign(order: Sequence[int], parities: Sequence[int]) -> int:
    """Sign of reordering cells ``0..k-1`` into ``order`` (only odd cells count)."""
    odd = [i for i in order if parities[i] & 1]
    return permutation_sign(odd)


def decorated_canonical(t: Tree, labels: Sequence[str], parities: Sequence[int]) -> Tuple[str, int, Tuple[int, ...]]:
    """Canonical form of a tree whose leaf ``i`` holds the input ``labels[i-1]``.

    The orientation word is the preorder of internal vertices (odd) followed by
    the inputs in leaf-label order (parity ``parities[i-1]``).  Returns the
    canonical string, the sign relating the given word to the canonical one
    (0 if an automorphism acts by -1) and the leaf labels in canonical
    left-to-right order.
    """
    counter = [0]

    def number(u):
        if isinstance(u, int):
            return u
        vid = counter[0]
        counter[0] += 1
        return ("v", vid, tuple(number(c) for c in u))

    numbered = number(t)

    def arrangements(u):
        # yields (key, vertex preorder ids, leaf order); keys compare as tuples
        if isinstance(u, int):
            return [((0, labels[u - 1]), (), (u,))]
        _, vid, kids = u
        options = [arrangements(c) for c in kids]
        out = []
        for perm in permutations(range(len(kids))):
            for combo in product(*(options[i] for i in perm)):
                key = (1, tuple(c[0] for c in combo))
                verts = (vid,) + tuple(v for c in combo for v in c[1])
                lv = tuple(x for c in combo for x in c[2])
                out.append((key, verts, lv))
        best = min(o[0] for o in out)
        return [o for o in out if o[0] == best]

    best = arrangements(numbered)
    signs = set()
    for s, verts, lv in best:
        v_sign = permutation_sign(verts)
        leaf_sign = koszul_sign([x - 1 for x in lv], parities)
        signs.add(v_sign * leaf_sign)
    key, verts, lv = best[0]
    text = _key_text(key)
    if len(signs) > 1:
        return text, 0, lv
    return text, signs.pop(), lv


def _key_text(key) -> str:
    if key[0] == 0:
        return key[1]
    return "(" + ",".join(_key_text(k) for k in key[1]) + ")"
