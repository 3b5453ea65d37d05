"""Finite structures over a signature of binary relations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import OrientedGraph, mask_of


@dataclass(frozen=True)
class BinaryStructure:
    """Domain ``1..n``; ``rels[i][u]`` is the mask of ``v`` with ``(u, v)`` in relation ``names[i]``."""

    n: int
    names: tuple[str, ...]
    rels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.names) != len(self.rels):
            raise ValueError("one mask table per relation name")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate relation name")
        for table in self.rels:
            if len(table) != self.n + 1:
                raise ValueError("mask table has the wrong length")

    def relation(self, name: str) -> tuple[int, ...]:
        try:
            return self.rels[self.names.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def holds(self, name: str, u: int, v: int) -> bool:
        return bool((self.relation(name)[u] >> v) & 1)

    def pairs(self, name: str) -> list[tuple[int, int]]:
        table = self.relation(name)
        return [(u, v) for u in range(1, self.n + 1) for v in range(1, self.n + 1) if (table[u] >> v) & 1]

    def state_array(self) -> np.ndarray:
        """int8 array ``st[r, u, v]`` with 1 where ``(u, v)`` is in relation ``r``."""
        st = np.zeros((len(self.rels), self.n + 1, self.n + 1), dtype=np.int8)
        for r, table in enumerate(self.rels):
            for u in range(1, self.n + 1):
                m = table[u]
                while m:
                    low = m & -m
                    st[r, u, low.bit_length() - 1] = 1
                    m ^= low
        return st

    def drop(self, name: str) -> BinaryStructure:
        i = self.names.index(name)
        return BinaryStructure(self.n, self.names[:i] + self.names[i + 1:], self.rels[:i] + self.rels[i + 1:])

    def induced(self, vertices: Sequence[int]) -> BinaryStructure:
        vs = list(vertices)
        new = {v: i for i, v in enumerate(vs, 1)}
        rels = []
        for table in self.rels:
            t = [0]
            for v in vs:
                m = 0
                for w in vs:
                    if (table[v] >> w) & 1:
                        m |= 1 << new[w]
                t.append(m)
            rels.append(tuple(t))
        return BinaryStructure(len(vs), self.names, tuple(rels))

    def relabel(self, pi: Sequence[int]) -> BinaryStructure:
        """Vertex ``v`` becomes ``pi[v - 1]``."""
        n = self.n
        rels = []
        for table in self.rels:
            t = [0] * (n + 1)
            for v in range(1, n + 1):
                m = 0
                for w in range(1, n + 1):
                    if (table[v] >> w) & 1:
                        m |= 1 << pi[w - 1]
                t[pi[v - 1]] = m
            rels.append(tuple(t))
        return BinaryStructure(n, self.names, tuple(rels))


def order_relation(order: Sequence[int]) -> tuple[int, ...]:
    """Masks of the strict order in which ``order`` is increasing."""
    n = len(order)
    table = [0] * (n + 1)
    later = 0
    for v in reversed(order):
        table[v] = later
        later |= 1 << v
    return tuple(table)


def from_graph(
    g: OrientedGraph,
    order: Sequence[int] | None = None,
    extra: Mapping[str, Sequence[int]] | Iterable[Sequence[int]] = (),
) -> BinaryStructure:
    """The arc relation, optionally a total order ``ord`` and extra relations.

    Extra relations given as a plain sequence are named ``rel1``, ``rel2``, ...
    """
    names = ["arc"]
    rels = [tuple(g.out)]
    if order is not None:
        if sorted(order) != list(range(1, g.n + 1)):
            raise ValueError("order must list every vertex once")
        names.append("ord")
        rels.append(order_relation(order))
    items = extra.items() if isinstance(extra, Mapping) else (
        (f"rel{i}", t) for i, t in enumerate(extra, 1)
    )
    for name, table in items:
        names.append(name)
        rels.append(tuple(table))
    return BinaryStructure(g.n, tuple(names), tuple(rels))


def from_pairs(n: int, relations: Mapping[str, Iterable[tuple[int, int]]]) -> BinaryStructure:
    names, rels = [], []
    for name, pairs in relations.items():
        table = [0] * (n + 1)
        for u, v in pairs:
            table[u] |= 1 << v
        names.append(name)
        rels.append(tuple(table))
    return BinaryStructure(n, tuple(names), tuple(rels))


def relation_masks(n: int, pairs: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    table = [0] * (n + 1)
    for u, v in pairs:
        table[u] |= 1 << v
    return tuple(table)


__all__ = [
    "BinaryStructure",
    "from_graph",
    "from_pairs",
    "mask_of",
    "order_relation",
    "relation_masks",
]
