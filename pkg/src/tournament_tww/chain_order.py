"""Chain quasi-orders and extraction of non-overlapping intervals from a BST order.

The extraction walks one heavy branch of the search tree, cuts it into
blocks where the weight drops by at least three, and keeps one part per
block on the majority side of the branch leaf. Everything after the tree
traversal is linear in ``n + sum(|P|)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .bst import BstTree, left_to_right, order_rank
from .errors import BudgetUnderflow, InvalidFamily, NotAChain, WrongEnumeration
from .graph import OrientedGraph, chain_order, full_mask, independence_number, mask_of, members

PLUS = "+"
MINUS = "-"


@dataclass(frozen=True)
class ChainQuasiOrder:
    """Classes ``B_1, {c_1}, ..., B_k, {c_k}, A_k`` as vertex masks."""

    n: int
    chain: tuple[int, ...]
    orientation: str
    classes: tuple[int, ...]
    rank: tuple[int, ...]  # class index per vertex, index 0 unused

    def class_of(self, v: int) -> int:
        return self.rank[v]

    def class_members(self) -> list[list[int]]:
        return [members(c) for c in self.classes]

    def precedes(self, x: int, y: int) -> bool:
        """``x`` is weakly before ``y``."""
        return self.rank[x] <= self.rank[y]


def chain_quasi_order(g: OrientedGraph, chain: Sequence[int], o: str = PLUS) -> ChainQuasiOrder:
    """Quasi-order classifying each vertex by the first chain element whose
    ``o``-neighbourhood it leaves.

    For '+' the chain must be enumerated with arcs ``c_i -> c_j`` for i < j,
    for '-' with arcs ``c_j -> c_i``.
    """
    if o not in (PLUS, MINUS):
        raise ValueError(f"orientation must be '+' or '-', got {o!r}")
    chain = [int(c) for c in chain]
    cmask = mask_of(chain)
    if len(chain) != cmask.bit_count():
        raise NotAChain("repeated chain vertex")
    expected = chain_order(g, cmask)
    if o == MINUS:
        expected = expected[::-1]
    if expected != chain:
        raise WrongEnumeration(f"chain must be enumerated as {expected} for orientation {o}")
    nbr = g.out if o == PLUS else g.inn
    a = full_mask(g.n) & ~cmask
    classes: list[int] = []
    for c in chain:
        nxt = a & nbr[c]
        classes.append(a & ~nxt)
        classes.append(1 << c)
        a = nxt
    classes.append(a)
    rank = [0] * (g.n + 1)
    for idx, cls in enumerate(classes):
        for v in members(cls):
            rank[v] = idx
    return ChainQuasiOrder(g.n, tuple(chain), o, tuple(classes), tuple(rank))


def overlapping(q: ChainQuasiOrder, x: Iterable[int], y: Iterable[int]) -> bool:
    """Some ``x1 <= y1`` and some ``x2 >= y2`` (weakly)."""
    rx = [q.rank[v] for v in x]
    ry = [q.rank[v] for v in y]
    if not rx or not ry:
        return False
    return min(rx) <= max(ry) and max(rx) >= min(ry)


@dataclass(frozen=True)
class IntervalFamily:
    parts: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, parts: Iterable[Iterable[int]]) -> IntervalFamily:
        return cls(tuple(tuple(sorted(int(v) for v in p)) for p in parts))

    @classmethod
    def singletons(cls, vertices: Iterable[int]) -> IntervalFamily:
        return cls(tuple((int(v),) for v in vertices))

    def __len__(self) -> int:
        return len(self.parts)

    def check(self, order: Sequence[int]) -> list[tuple[int, int]]:
        """Validate against ``order``; return (first rank, last rank) per part."""
        rank = order_rank(order)
        n = len(order)
        seen = [False] * (n + 1)
        spans = []
        for p in self.parts:
            if not p:
                raise InvalidFamily("empty part")
            rs = []
            for v in p:
                if not 1 <= v <= n:
                    raise InvalidFamily(f"vertex {v} out of range")
                if seen[v]:
                    raise InvalidFamily(f"vertex {v} lies in two parts")
                seen[v] = True
                rs.append(rank[v])
            lo, hi = min(rs), max(rs)
            if hi - lo + 1 != len(p):
                raise InvalidFamily(f"part {list(p)} is not an interval of the order")
            spans.append((lo, hi))
        return spans


def budget(k: int, arity: int = 2) -> int:
    """Parts needed to guarantee ``k`` non-overlapping ones.

    ``f(0) = 1`` and ``f(k + 1) = d^2 f(k) + 3d + 3`` for trees with at most
    ``d`` children per node; for binary trees this is ``4 f(k) + 9``.
    """
    f = 1
    for _ in range(k):
        f = arity * arity * f + 3 * arity + 3
    return f


def oriented_budget(k: int, alpha: int, arity: int = 3) -> int:
    """Each center-branching chain node costs one part; there are < alpha of them."""
    return budget(k + max(alpha - 1, 0), arity)


@dataclass
class ExtractionTrace:
    branch: list[int]
    weights: list[int]
    indices: list[int]
    arity: int
    side: str | None = None
    # per block: selected part index on the left / right side (or None)
    left_choice: list[int | None] = field(default_factory=list)
    right_choice: list[int | None] = field(default_factory=list)
    removed: list[int] = field(default_factory=list)  # anti-complete chain nodes dropped
    dropped_parts: list[int] = field(default_factory=list)
    # label per vertex: (block, side) or None; block numbers start at 1
    labels: list = field(default_factory=list, repr=False)

    def block_sets(self) -> dict[tuple[int, str], list[int]]:
        """The sets ``L'_l`` and ``R'_l``, keyed by (l, side)."""
        out: dict[tuple[int, str], list[int]] = {}
        for v, lab in enumerate(self.labels):
            if lab is not None:
                out.setdefault(lab, []).append(v)
        return out

    def check(self) -> list[str]:
        """Violated invariants (empty when all hold)."""
        bad = []
        w, d = self.weights, self.arity
        for i in range(len(w) - 1):
            if w[i + 1] > w[i]:
                bad.append(f"weight increases at step {i}")
            if d * w[i + 1] + 1 < w[i]:
                bad.append(f"{d}*w[{i + 1}]+1 < w[{i}]")
        idx = self.indices
        if idx and idx[0] != 0:
            bad.append("first index is not 0")
        for a, b in zip(idx, idx[1:]):
            if not w[b] <= w[a] - 3:
                bad.append(f"index {b} does not drop weight by 3 from {a}")
            if any(w[j] <= w[a] - 3 for j in range(a + 1, b)):
                bad.append(f"index {b} is not minimal after {a}")
            if d * w[b] + 3 < w[a]:
                bad.append(f"{d}*w[{b}]+3 < w[{a}]")
        return bad


@dataclass(frozen=True)
class Extraction:
    chain: tuple[int, ...]
    orientation: str
    parts: IntervalFamily
    trace: ExtractionTrace


def extract_nonoverlapping(
    g: OrientedGraph,
    t: BstTree,
    family: IntervalFamily,
    k: int,
    enforce_budget: bool = False,
    alpha: int | None = None,
) -> Extraction:
    """Chain ``C``, orientation ``o`` and ``P' <= P`` pairwise non-overlapping
    for ``chain_quasi_order(g, C, o)``.

    With enough parts (see :func:`budget` and :func:`oriented_budget`) the
    result has at least ``k`` parts. Otherwise the best effort is returned.
    ``alpha`` is only needed for the budget check on non-tournaments and is
    computed when omitted.
    """
    n = g.n
    order = left_to_right(t)
    spans = family.check(order)
    arity = 2
    for v in range(1, n + 1):
        arity = max(arity, len(t.children(v)))
    if enforce_budget:
        if g.is_tournament():
            need = budget(k, arity)
        else:
            a = independence_number(g) if alpha is None else alpha
            need = oriented_budget(k, a, arity)
        if len(family) < need:
            raise BudgetUnderflow(len(family), need, k)

    # parts sorted by position; part index per rank
    start_at = [-1] * n
    for i, (lo, _) in enumerate(spans):
        start_at[lo] = i
    sorted_ids = [i for i in start_at if i >= 0]
    part_at = [-1] * n
    for pos, i in enumerate(sorted_ids):
        lo, hi = spans[i]
        for r in range(lo, hi + 1):
            part_at[r] = pos
    rank = order_rank(order)
    left, center, right = t.left, t.center, t.right

    # bottom-up: min/max sorted part index met by each subtree, and its rank span
    pmin = [n] * (n + 1)
    pmax = [-1] * (n + 1)
    rlo = [0] * (n + 1)
    rhi = [0] * (n + 1)
    for v in reversed(t.preorder()):
        r = rank[v]
        p = part_at[r]
        lo_p, hi_p = (p, p) if p >= 0 else (n, -1)
        lo_r = hi_r = r
        for c in (left[v], center[v], right[v]):
            if c:
                if pmin[c] < lo_p:
                    lo_p = pmin[c]
                if pmax[c] > hi_p:
                    hi_p = pmax[c]
                if rlo[c] < lo_r:
                    lo_r = rlo[c]
                if rhi[c] > hi_r:
                    hi_r = rhi[c]
        pmin[v], pmax[v], rlo[v], rhi[v] = lo_p, hi_p, lo_r, hi_r

    def weight(v: int) -> int:
        return pmax[v] - pmin[v] + 1 if pmax[v] >= 0 else 0

    path: list[int] = []
    weights: list[int] = []
    v = t.root if n else 0
    while v:
        path.append(v)
        weights.append(weight(v))
        best, best_w = 0, -1
        for c in (left[v], center[v], right[v]):  # ties: left, then center, then right
            if c and weight(c) > best_w:
                best, best_w = c, weight(c)
        v = best
    p = len(path) - 1

    # center-branching nodes each cost one part, so aim for that many extra blocks
    centers = [i for i in range(p) if center[path[i]] == path[i + 1]]
    target = k + len(centers)
    indices = [0] if path else []
    j = 1
    while path and len(indices) <= 2 * target:
        base = weights[indices[-1]] - 3
        while j <= p and weights[j] > base:
            j += 1
        if j > p:
            break
        indices.append(j)
        j += 1
    trace = ExtractionTrace(path, weights, indices, arity)
    blocks = len(indices) - 1

    # label every vertex branching off the path inside a block: (block, side)
    labels: list = [None] * (n + 1)
    by_rank: list = [None] * n

    def paint(c: int, lab) -> None:
        if c:
            for r in range(rlo[c], rhi[c] + 1):
                by_rank[r] = lab

    side_of = [None] * (n + 1)  # side of each branch node relative to the leaf
    for i in range(p):
        b, nxt = path[i], path[i + 1]
        if nxt == left[b]:
            side_of[b] = "R"
        else:
            side_of[b] = "L"
    ell = 1
    for i in range(indices[-1] if blocks else 0):
        while indices[ell] <= i:
            ell += 1
        b, nxt = path[i], path[i + 1]
        lab_l, lab_r = (ell, "L"), (ell, "R")
        if nxt == left[b]:
            by_rank[rank[b]] = lab_r
            paint(center[b], lab_r)
            paint(right[b], lab_r)
        elif nxt == center[b]:
            by_rank[rank[b]] = lab_l
            paint(left[b], lab_l)
            paint(right[b], lab_r)
        else:
            by_rank[rank[b]] = lab_l
            paint(left[b], lab_l)
            paint(center[b], lab_l)
    for r in range(n):
        labels[order[r]] = by_rank[r]
    trace.labels = labels

    left_choice: list = [None] * (blocks + 1)
    right_choice: list = [None] * (blocks + 1)
    for pos, i in enumerate(sorted_ids):
        lo, hi = spans[i]
        lab = by_rank[lo]
        if lab is None:
            continue
        for r in range(lo + 1, hi + 1):
            if by_rank[r] != lab:
                break
        else:
            choice = left_choice if lab[1] == "L" else right_choice
            if choice[lab[0]] is None:
                choice[lab[0]] = i
    trace.left_choice = left_choice[1:]
    trace.right_choice = right_choice[1:]
    n_left = sum(c is not None for c in trace.left_choice)
    n_right = sum(c is not None for c in trace.right_choice)
    side = "L" if n_left >= n_right else "R"
    trace.side = side
    chosen = [c for c in (trace.left_choice if side == "L" else trace.right_choice) if c is not None]

    chain = [b for b in path[:p] if side_of[b] == side]
    # a center-branching node is anti-complete to the rest of the branch, so its
    # subtree on the chosen side (left subtree plus itself for L, right subtree
    # for R) lands in unpredictable classes; drop the parts meeting it
    branching = [path[i] for i in centers]
    regions = []
    for b in branching:
        if side == "L":
            regions.append((rlo[left[b]] if left[b] else rank[b], rank[b]))
        elif right[b]:
            regions.append((rlo[right[b]], rhi[right[b]]))
    if branching:
        gone = set(branching)
        chain = [b for b in chain if b not in gone]
        keep = []
        for i in chosen:
            lo, hi = spans[i]
            if any(lo <= b_hi and a_lo <= hi for a_lo, b_hi in regions):
                trace.dropped_parts.append(i)
            else:
                keep.append(i)
        chosen = keep
        trace.removed = branching
    o = PLUS if side == "L" else MINUS
    parts = IntervalFamily(tuple(family.parts[i] for i in chosen))
    return Extraction(tuple(chain), o, parts, trace)


def verify_extraction(g: OrientedGraph, e: Extraction) -> list[str]:
    """Independent re-check: chain valid, parts pairwise non-overlapping."""
    problems = []
    try:
        q = chain_quasi_order(g, e.chain, e.orientation)
    except (NotAChain, WrongEnumeration) as exc:
        return [f"chain rejected: {exc}"]
    parts = e.parts.parts
    for a in range(len(parts)):
        for b in range(a + 1, len(parts)):
            if overlapping_bruteforce(q, parts[a], parts[b]):
                problems.append(f"parts {a} and {b} overlap")
    problems += e.trace.check()
    return problems


def overlapping_bruteforce(q: ChainQuasiOrder, x: Sequence[int], y: Sequence[int]) -> bool:
    """Definition-level check over all witness pairs."""
    le = any(q.precedes(x1, y1) for x1 in x for y1 in y)
    ge = any(q.precedes(y2, x2) for x2 in x for y2 in y)
    return le and ge
