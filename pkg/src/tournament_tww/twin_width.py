"""Contraction sequences, width evaluation, exact and greedy twin-width.

Parts are always named by their smallest vertex. The incremental evaluator
keeps a three-state flag per relation and ordered part pair (none / all /
mixed) and delegates the per-merge update to the kernels in ``_accel``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import _accel
from .bst import BstTree, bst_build, left_to_right
from .errors import InvalidMerge, Overlap, SizeLimitError
from .graph import OrientedGraph, Tournament, mask_of, members
from .matrix import Division, adjacency_matrix, find_rank_division, is_rank_division
from .structure import BinaryStructure, from_graph

EXACT_MAX_N = 8


@dataclass(frozen=True)
class ContractionSequence:
    n: int
    merges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "merges", tuple((int(u), int(v)) for u, v in self.merges))

    def partitions(self) -> list[list[int]]:
        """Partition (as sorted part masks) after each merge, starting with singletons."""
        find = list(range(self.n + 1))

        def root(v):
            while find[v] != v:
                find[v] = find[find[v]]
                v = find[v]
            return v

        masks = {v: 1 << v for v in range(1, self.n + 1)}
        out = [sorted(masks.values())]
        for u, v in self.merges:
            a, b = _check_merge(self.n, root, u, v)
            find[b] = a
            masks[a] |= masks.pop(b)
            out.append(sorted(masks.values()))
        return out

    def canonical(self) -> ContractionSequence:
        """Same partitions, merges named by the two parts' smallest vertices."""
        find = list(range(self.n + 1))

        def root(v):
            while find[v] != v:
                v = find[v]
            return v

        merges = []
        for u, v in self.merges:
            a, b = _check_merge(self.n, root, u, v)
            find[b] = a
            merges.append((a, b))
        return ContractionSequence(self.n, tuple(merges))


def _check_merge(n, root, u, v) -> tuple[int, int]:
    if not (1 <= u <= n and 1 <= v <= n):
        raise InvalidMerge(f"merge ({u}, {v}) out of range")
    a, b = root(u), root(v)
    if a == b:
        raise InvalidMerge(f"{u} and {v} are already in the same part")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class WidthReport:
    step_widths: tuple[int, ...]
    width: int
    argmax_step: int | None = None  # 1-based merge index
    argmax_part: int | None = None  # smallest vertex of a part attaining it

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "step_widths": list(self.step_widths),
            "argmax_step": self.argmax_step,
            "argmax_part": self.argmax_part,
        }


def _relation_type(table: Sequence[int], x: int, y: int) -> int | None:
    """0 if no pair of ``x`` times ``y`` is related, 1 if all are, None if mixed."""
    kind = None
    for u in members(x):
        hit = table[u] & y
        if hit == 0:
            k = 0
        elif hit == y:
            k = 1
        else:
            return None
        if kind is None:
            kind = k
        elif kind != k:
            return None
    return kind


def is_homogeneous(s: BinaryStructure, x, y) -> bool:
    """No relation distinguishes vertices of ``x`` as seen from ``y`` or vice versa."""
    xm = x if isinstance(x, int) else mask_of(x)
    ym = y if isinstance(y, int) else mask_of(y)
    if xm & ym:
        raise Overlap("sets must be disjoint")
    if not xm or not ym:
        raise ValueError("sets must be nonempty")
    for table in s.rels:
        if _relation_type(table, xm, ym) is None or _relation_type(table, ym, xm) is None:
            return False
    return True


def error_degrees(s: BinaryStructure, parts: Sequence[int]) -> list[int]:
    """Definition-level error degree of each part mask."""
    out = [0] * len(parts)
    for i, j in combinations(range(len(parts)), 2):
        if not is_homogeneous(s, parts[i], parts[j]):
            out[i] += 1
            out[j] += 1
    return out


def partition_width(s: BinaryStructure, parts: Sequence[int]) -> int:
    return max(error_degrees(s, parts), default=0)


class ContractionState:
    """Incremental bookkeeping for one structure under successive merges."""

    def __init__(self, s: BinaryStructure):
        n = s.n
        self.n = n
        self.st = np.ascontiguousarray(s.state_array())
        self.alive = np.zeros(n + 1, dtype=np.uint8)
        self.alive[1:] = 1
        self.red = np.zeros((n + 1, n + 1), dtype=np.uint8)
        self.deg = np.zeros(n + 1, dtype=np.int32)
        self.width = 0

    def trial(self, p: int, q: int) -> int:
        return _accel.trial_merge(self.st, self.alive, self.red, self.deg, p, q)

    def merge(self, p: int, q: int) -> int:
        if p > q:
            p, q = q, p
        if p == q or not (self.alive[p] and self.alive[q]):
            raise InvalidMerge(f"parts {p} and {q} are not two live parts")
        self.width = _accel.apply_merge(self.st, self.alive, self.red, self.deg, p, q)
        return self.width

    def argmax_part(self) -> int:
        live = np.nonzero(self.alive)[0]
        return int(live[np.argmax(self.deg[live])])


def width_of_sequence(s: BinaryStructure, seq: ContractionSequence, mode: str = "incremental") -> WidthReport:
    """Width of ``seq`` on ``s``; ``mode="recompute"`` re-derives every step from the definition."""
    if seq.n != s.n:
        raise InvalidMerge(f"sequence is for {seq.n} vertices, structure has {s.n}")
    if len(seq.merges) != max(s.n - 1, 0):
        raise InvalidMerge(f"sequence needs {max(s.n - 1, 0)} merges, got {len(seq.merges)}")
    steps: list[int] = []
    parts_at: list[int] = []
    if mode == "recompute":
        for parts in seq.partitions()[1:]:
            degs = error_degrees(s, parts)
            w = max(degs, default=0)
            steps.append(w)
            parts_at.append((parts[degs.index(w)] & -parts[degs.index(w)]).bit_length() - 1)
    elif mode == "incremental":
        state = ContractionState(s)
        for a, b in seq.canonical().merges:
            steps.append(state.merge(a, b))
            parts_at.append(state.argmax_part())
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not steps:
        return WidthReport((), 0, None, None)
    w = max(steps)
    i = steps.index(w)
    return WidthReport(tuple(steps), w, i + 1, parts_at[i])


def greedy_contraction(
    s: BinaryStructure,
    policy: str = "best-pair",
    order: Sequence[int] | None = None,
) -> tuple[WidthReport, ContractionSequence]:
    """best-pair: merge the pair minimising the next step's width (ties: smallest pair).
    order-adjacent: same choice restricted to parts consecutive in ``order``,
    whose parts therefore stay intervals of it."""
    n = s.n
    state = ContractionState(s)
    merges: list[tuple[int, int]] = []
    steps: list[int] = []
    argparts: list[int] = []
    if policy == "order-adjacent":
        if order is None:
            if "ord" not in s.names:
                raise ValueError("order-adjacent policy needs an order")
            table = s.relation("ord")
            order = sorted(range(1, n + 1), key=lambda v: -table[v].bit_count())
        if sorted(order) != list(range(1, n + 1)):
            raise ValueError("order must list every vertex once")
        # runs of consecutive vertices, each named by its smallest member
        runs = [int(v) for v in order]
        while len(runs) > 1:
            best = None
            for i in range(len(runs) - 1):
                a, b = sorted((runs[i], runs[i + 1]))
                w = state.trial(a, b)
                if best is None or (w, a, b) < best[0]:
                    best = ((w, a, b), i)
            (_, a, b), i = best
            steps.append(state.merge(a, b))
            argparts.append(state.argmax_part())
            merges.append((a, b))
            runs[i:i + 2] = [a]
    elif policy == "best-pair":
        live = list(range(1, n + 1))
        while len(live) > 1:
            best = None
            for a, b in combinations(live, 2):
                w = state.trial(a, b)
                if best is None or w < best[0]:
                    best = (w, a, b)
            _, a, b = best
            steps.append(state.merge(a, b))
            argparts.append(state.argmax_part())
            merges.append((a, b))
            live.remove(b)
    else:
        raise ValueError(f"unknown policy {policy!r}")
    seq = ContractionSequence(n, tuple(merges))
    if not steps:
        return WidthReport((), 0), seq
    w = max(steps)
    i = steps.index(w)
    return WidthReport(tuple(steps), w, i + 1, argparts[i]), seq


def _merge_masks(parts: tuple[int, ...], i: int, j: int) -> tuple[int, ...]:
    merged = parts[i] | parts[j]
    rest = [p for t, p in enumerate(parts) if t != i and t != j]
    rest.append(merged)
    return tuple(sorted(rest, key=lambda m: m & -m))


def _low(m: int) -> int:
    return (m & -m).bit_length() - 1


def exact_twin_width(s: BinaryStructure, max_n: int = EXACT_MAX_N) -> tuple[int, ContractionSequence]:
    """Optimal width with a witness sequence.

    Iterative deepening on the width bound; for each bound a depth-first
    search over partitions with a memo of partitions known to be dead ends.
    Children are tried in order of their own width, then by smallest pair,
    so the witness is deterministic.
    """
    n = s.n
    if n > max_n:
        raise SizeLimitError("exact_twin_width", n, max_n)
    if n <= 1:
        return 0, ContractionSequence(n, ())
    start = tuple(1 << v for v in range(1, n + 1))
    width_cache: dict[tuple[int, ...], int] = {}

    def width(parts):
        w = width_cache.get(parts)
        if w is None:
            w = partition_width(s, parts)
            width_cache[parts] = w
        return w

    for bound in range(n):
        dead: set[tuple[int, ...]] = set()
        path: list[tuple[int, int]] = []

        def search(parts) -> bool:
            if len(parts) == 1:
                return True
            if parts in dead:
                return False
            options = []
            for i, j in combinations(range(len(parts)), 2):
                nxt = _merge_masks(parts, i, j)
                w = width(nxt)
                if w <= bound:
                    options.append((w, _low(parts[i]), _low(parts[j]), nxt))
            options.sort(key=lambda o: o[:3])
            for _, a, b, nxt in options:
                path.append((a, b))
                if search(nxt):
                    return True
                path.pop()
            dead.add(parts)
            return False

        if search(start):
            return bound, ContractionSequence(n, tuple(path))
    raise AssertionError("some sequence always has width below n")


def exact_twin_width_dp(s: BinaryStructure, max_n: int = EXACT_MAX_N) -> int:
    """Independent oracle: min-max over every partition reachable from singletons.

    ``best[P]`` is the least achievable maximum width from ``P`` down to one
    part; computed by increasing part count, without the search's pruning.
    """
    n = s.n
    if n > max_n:
        raise SizeLimitError("exact_twin_width_dp", n, max_n)
    if n <= 1:
        return 0
    layers: list[set[tuple[int, ...]]] = [set() for _ in range(n + 1)]
    layers[n].add(tuple(1 << v for v in range(1, n + 1)))
    for size in range(n, 1, -1):
        for parts in layers[size]:
            for i, j in combinations(range(size), 2):
                layers[size - 1].add(_merge_masks(parts, i, j))
    best: dict[tuple[int, ...], int] = {p: 0 for p in layers[1]}
    for size in range(2, n + 1):
        for parts in layers[size]:
            best[parts] = min(
                max(partition_width(s, nxt), best[nxt])
                for nxt in (_merge_masks(parts, i, j) for i, j in combinations(range(size), 2))
            )
    return best[layers[n].pop()]


@dataclass
class ApproxResult:
    """Exactly one of ``division`` / ``sequence`` is set."""

    order: list[int]
    k: int
    division: Division | None = None
    division_exact: bool = True
    sequence: ContractionSequence | None = None
    report: WidthReport | None = None
    notes: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return "rank-division" if self.division is not None else "contraction"


def approximate_tournament_tww(
    g: Tournament | OrientedGraph,
    k: int,
    strategy: str = "random",
    seed: int | None = 0,
    tree: BstTree | None = None,
) -> ApproxResult:
    """BST order first; then either a rank-k division of the ordered adjacency
    matrix (the tournament is large) or an order-adjacent contraction
    sequence of the ordered tournament (an upper bound).

    ``tree`` overrides the built search tree."""
    order = left_to_right(tree if tree is not None else bst_build(g, strategy, seed=seed))
    if g.n == 0:
        return ApproxResult(order, k, sequence=ContractionSequence(0, ()), report=WidthReport((), 0))
    m = adjacency_matrix(g, order)
    res = find_rank_division(m, k)
    if res.found:
        return ApproxResult(order, k, division=res.division, division_exact=res.exact)
    s = from_graph(g, order)
    report, seq = greedy_contraction(s, "order-adjacent", order)
    notes = {"rank_division_search": "exhaustive" if res.exact else "heuristic"}
    return ApproxResult(order, k, sequence=seq, report=report, notes=notes)


def verify_approx(g: OrientedGraph, r: ApproxResult) -> bool:
    """Re-check the returned witness with the definition-level checkers."""
    if (r.division is None) == (r.sequence is None):
        return False
    if r.division is not None:
        return is_rank_division(adjacency_matrix(g, r.order), r.division, r.k)
    s = from_graph(g, r.order)
    rep = width_of_sequence(s, r.sequence, mode="recompute")
    return rep.width == r.report.width
