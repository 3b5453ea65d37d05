"""Binary search trees on tournaments, ternary search trees on oriented graphs.

A node's left subtree holds in-neighbours, its right subtree out-neighbours
and (ternary only) its center subtree non-neighbours. All traversals are
iterative so that degenerate trees of depth ``n`` are fine.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, NotAChain, NotALeaf
from .graph import OrientedGraph, chain_order, mask_of

BINARY = "binary"
TERNARY = "ternary"
STRATEGIES = ("insertion", "random", "median")


@dataclass(frozen=True)
class BstTree:
    """Children are stored per vertex; ``0`` means absent.

    ``center`` is all zeros for binary trees.
    """

    arity: str
    root: int
    left: tuple[int, ...]
    center: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        if self.arity not in (BINARY, TERNARY):
            raise InputError(f"unknown arity {self.arity!r}")
        n = self.n
        if not (len(self.left) == len(self.center) == len(self.right) == n + 1):
            raise InputError("child arrays have inconsistent lengths")
        if self.arity == BINARY and any(self.center):
            raise InputError("binary tree with a center child")
        if n == 0:
            return
        if not 1 <= self.root <= n:
            raise InputError(f"root {self.root} out of range")
        parent = [0] * (n + 1)
        for v in range(1, n + 1):
            for c in (self.left[v], self.center[v], self.right[v]):
                if c == 0:
                    continue
                if not 1 <= c <= n:
                    raise InputError(f"child {c} of {v} out of range")
                if parent[c] or c == self.root:
                    raise InputError(f"vertex {c} has two parents")
                parent[c] = v
        seen = 0
        stack = [self.root]
        while stack:
            v = stack.pop()
            seen += 1
            stack.extend(c for c in self.children(v))
        if seen != n:
            raise InputError("tree does not span every vertex exactly once")

    @property
    def n(self) -> int:
        return len(self.left) - 1

    def children(self, v: int) -> list[int]:
        return [c for c in (self.left[v], self.center[v], self.right[v]) if c]

    def is_leaf(self, v: int) -> bool:
        return not (self.left[v] or self.center[v] or self.right[v])

    def leaves(self) -> list[int]:
        return [v for v in range(1, self.n + 1) if self.is_leaf(v)]

    def parents(self) -> list[int]:
        par = [0] * (self.n + 1)
        for v in range(1, self.n + 1):
            for c in self.children(v):
                par[c] = v
        return par

    def preorder(self) -> list[int]:
        if self.n == 0:
            return []
        out, stack = [], [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            for c in (self.right[v], self.center[v], self.left[v]):
                if c:
                    stack.append(c)
        return out

    def depth(self) -> int:
        if self.n == 0:
            return 0
        best, stack = 0, [(self.root, 1)]
        while stack:
            v, d = stack.pop()
            best = max(best, d)
            stack.extend((c, d + 1) for c in self.children(v))
        return best


def _tree(arity: str, n: int, root: int, left, center, right) -> BstTree:
    return BstTree(arity, root, tuple(left), tuple(center), tuple(right))


def _default_arity(g: OrientedGraph) -> str:
    return BINARY if g.is_tournament() else TERNARY


def _row_bits(mask: int, n: int) -> np.ndarray:
    """0/1 array of length ``n + 1`` with the bits of ``mask``."""
    raw = mask.to_bytes((n + 8) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[: n + 1]


def bst_build(
    g: OrientedGraph,
    strategy: str = "insertion",
    seq: Sequence[int] | None = None,
    seed: int | None = None,
    arity: str | None = None,
) -> BstTree:
    """Build a search tree of ``g``.

    insertion: vertices of ``seq`` (default ``1..n``) are inserted one by one.
    random: quicksort-style with a uniformly random pivot (seeded).
    median: pivot whose out-degree inside the current set is closest to half
    the set size, ties to the smallest id.
    """
    n = g.n
    arity = arity or _default_arity(g)
    if arity == BINARY and not g.is_tournament():
        raise InputError("binary trees need a tournament; use ternary")
    left, center, right = [0] * (n + 1), [0] * (n + 1), [0] * (n + 1)
    if n == 0:
        return _tree(arity, 0, 0, left, center, right)
    if strategy == "insertion":
        seq = list(range(1, n + 1)) if seq is None else [int(v) for v in seq]
        if sorted(seq) != list(range(1, n + 1)):
            raise InputError("insertion sequence must list every vertex once")
        root = seq[0]
        out, inn = g.out, g.inn
        for v in seq[1:]:
            cur = root
            while True:
                if (inn[cur] >> v) & 1:
                    slot = left
                elif (out[cur] >> v) & 1:
                    slot = right
                else:
                    slot = center
                nxt = slot[cur]
                if not nxt:
                    slot[cur] = v
                    break
                cur = nxt
        return _tree(arity, n, root, left, center, right)
    if strategy == "random":
        return _build_random(g, arity, random.Random(seed), left, center, right)
    if strategy == "median":
        return _build_median(g, arity, left, center, right)
    raise InputError(f"unknown strategy {strategy!r}")


def _build_random(g, arity, rnd, left, center, right) -> BstTree:
    n = g.n

    def split(x: int, rest: np.ndarray):
        bi = _row_bits(g.inn[x], n)
        bo = _row_bits(g.out[x], n)
        lm = bi[rest] == 1
        rm = bo[rest] == 1
        return rest[lm], rest[~(lm | rm)], rest[rm]

    all_v = np.arange(1, n + 1)
    root = int(all_v[rnd.randrange(n)])
    # (parent, slot, vertex array); the root has no parent
    stack: list[tuple[int, list | None, np.ndarray]] = [(0, None, all_v)]
    while stack:
        parent, slot, s = stack.pop()
        x = root if slot is None else int(s[rnd.randrange(len(s))])
        if slot is not None:
            slot[parent] = x
        rest = s[s != x]
        if len(rest) == 0:
            continue
        lo, mid, hi = split(x, rest)
        for part, sl in ((lo, left), (mid, center), (hi, right)):
            if len(part):
                stack.append((x, sl, part))
    return _tree(arity, n, root, left, center, right)


def _build_median(g, arity, left, center, right) -> BstTree:
    n = g.n
    out, inn = g.out, g.inn

    def pivot(s: list[int], smask: int) -> int:
        size = len(s) - 1
        best, best_v = None, 0
        for v in s:  # s is sorted, so the first minimiser has the smallest id
            d = abs(2 * (out[v] & smask).bit_count() - size)
            if best is None or d < best:
                best, best_v = d, v
        return best_v

    stack: list[tuple[int, list | None, list[int]]] = [(0, None, list(range(1, n + 1)))]
    root = 0
    while stack:
        parent, slot, s = stack.pop()
        smask = mask_of(s)
        x = pivot(s, smask)
        if slot is None:
            root = x
        else:
            slot[parent] = x
        lo = [v for v in s if (inn[x] >> v) & 1]
        hi = [v for v in s if (out[x] >> v) & 1]
        mid = [v for v in s if v != x and not ((inn[x] | out[x]) >> v) & 1]
        for part, sl in ((lo, left), (mid, center), (hi, right)):
            if part:
                stack.append((x, sl, part))
    return _tree(arity, n, root, left, center, right)


@dataclass(frozen=True)
class Violation:
    node: int
    child: int
    reason: str

    def __str__(self) -> str:
        return f"violation({self.node}, {self.child}, {self.reason})"


def subtree_masks(t: BstTree) -> list[int]:
    masks = [0] * (t.n + 1)
    for v in reversed(t.preorder()):
        m = 1 << v
        for c in t.children(v):
            m |= masks[c]
        masks[v] = m
    return masks


def bst_validate(g: OrientedGraph, t: BstTree) -> Violation | None:
    """None when ``t`` is a valid search tree of ``g``; else the first
    violation in preorder, naming the earliest offending descendant."""
    if t.n != g.n:
        raise InputError("tree and graph have different vertex counts")
    if t.arity == BINARY and not g.is_tournament():
        return Violation(t.root, 0, "binary-tree-on-non-tournament")
    pre = t.preorder()
    masks = subtree_masks(t)
    order_pos = {v: i for i, v in enumerate(pre)}

    def first(bad: int) -> int:
        best = None
        v = bad
        while v:
            low = v & -v
            u = low.bit_length() - 1
            if best is None or order_pos[u] < order_pos[best]:
                best = u
            v ^= low
        return best

    for x in pre:
        checks = (
            (t.left[x], g.inn[x], "left-not-in-neighbour"),
            (t.center[x], ~(g.inn[x] | g.out[x]), "center-adjacent"),
            (t.right[x], g.out[x], "right-not-out-neighbour"),
        )
        for c, allowed, reason in checks:
            if c:
                bad = masks[c] & ~allowed
                if bad:
                    return Violation(x, first(bad), reason)
    return None


def left_to_right(t: BstTree) -> list[int]:
    """In-order: left subtree, node, center subtree, right subtree."""
    if t.n == 0:
        return []
    out: list[int] = []
    # entries (v, expanded): expanded nodes are emitted when popped
    stack: list[tuple[int, bool]] = [(t.root, False)]
    while stack:
        v, expanded = stack.pop()
        if expanded:
            out.append(v)
            continue
        if t.right[v]:
            stack.append((t.right[v], False))
        if t.center[v]:
            stack.append((t.center[v], False))
        stack.append((v, True))
        if t.left[v]:
            stack.append((t.left[v], False))
    return out


def order_rank(order: Sequence[int]) -> list[int]:
    rank = [0] * (len(order) + 1)
    for i, v in enumerate(order):
        rank[v] = i
    return rank


def branch(t: BstTree, leaf: int) -> list[int]:
    """Root-to-leaf path."""
    if not 1 <= leaf <= t.n or not t.is_leaf(leaf):
        raise NotALeaf(f"{leaf} is not a leaf")
    par = t.parents()
    path = [leaf]
    while path[-1] != t.root:
        path.append(par[path[-1]])
    return path[::-1]


def branch_chain_split(g: OrientedGraph, t: BstTree, leaf: int) -> tuple[list[int], list[int]]:
    """(chain part in <_S order, center-branching nodes X)."""
    path = branch(t, leaf)
    xs = [v for v, nxt in zip(path, path[1:]) if t.center[v] == nxt]
    xset = set(xs)
    rank = order_rank(left_to_right(t))
    rest = sorted((v for v in path if v not in xset), key=rank.__getitem__)
    return rest, xs


def check_branch(g: OrientedGraph, t: BstTree, leaf: int, rank: Sequence[int] | None = None) -> bool:
    """Chain part of the branch is a chain whose order agrees with <_S."""
    if rank is None:
        rank = order_rank(left_to_right(t))
    rest, _ = branch_chain_split(g, t, leaf)
    try:
        got = chain_order(g, rest)
    except NotAChain:
        return False
    return got == sorted(rest, key=rank.__getitem__)
