"""Loop-free oriented graphs and tournaments stored as dense bitmasks.

Vertices are the integers ``1..n``. Vertex ``v`` occupies bit ``v`` of every
mask (bit 0 is never set), so neighbourhood queries are plain ``int`` masks
and set algebra is a handful of big-integer operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DigonError,
    LoopError,
    MissingArcError,
    NotAChain,
    OutOfRangeError,
    SizeLimitError,
)

CANONICAL_MAX_N = 10
AUTOMORPHISM_MAX_N = 10
INDEPENDENCE_MAX_N = 64


def bit(v: int) -> int:
    return 1 << v


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: int) -> list[int]:
    """Vertices of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def iter_members(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def full_mask(n: int) -> int:
    return ((1 << (n + 1)) - 1) ^ 1


def _as_mask(s: int | Iterable[int]) -> int:
    return s if isinstance(s, int) else mask_of(s)


@dataclass(frozen=True, eq=False)
class OrientedGraph:
    """Directed graph without loops or digons.

    ``out[v]`` and ``inn[v]`` are the out- and in-neighbourhood masks of ``v``;
    index 0 is a placeholder so that vertex ids index directly.
    """

    n: int
    out: tuple[int, ...]
    inn: tuple[int, ...]

    kind = "oriented"

    def __eq__(self, other):
        if not isinstance(other, OrientedGraph):
            return NotImplemented
        return self.n == other.n and self.out == other.out

    def __hash__(self):
        return hash((self.n, self.out))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, arcs={self.arcs()})"

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @property
    def all(self) -> int:
        return full_mask(self.n)

    def has_arc(self, u: int, v: int) -> bool:
        return (self.out[u] >> v) & 1 == 1

    def adjacent(self, u: int, v: int) -> bool:
        return ((self.out[u] | self.inn[u]) >> v) & 1 == 1

    def neighbours(self, v: int) -> int:
        return self.out[v] | self.inn[v]

    def non_neighbours(self, v: int) -> int:
        return self.all & ~(self.out[v] | self.inn[v] | (1 << v))

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self.vertices for v in iter_members(self.out[u])]

    def arc_count(self) -> int:
        return sum(m.bit_count() for m in self.out)

    def out_degree(self, v: int, within: int | None = None) -> int:
        m = self.out[v]
        return (m if within is None else m & within).bit_count()

    def in_degree(self, v: int, within: int | None = None) -> int:
        m = self.inn[v]
        return (m if within is None else m & within).bit_count()

    def adjacency_array(self) -> np.ndarray:
        """Dense ``n x n`` boolean array, 0-indexed."""
        a = np.zeros((self.n, self.n), dtype=bool)
        for u in self.vertices:
            for v in iter_members(self.out[u]):
                a[u - 1, v - 1] = True
        return a

    def is_tournament(self) -> bool:
        full = self.all
        return all(
            (self.out[v] | self.inn[v] | (1 << v)) == full for v in self.vertices
        )


class Tournament(OrientedGraph):
    kind = "tournament"


def _finish(n: int, out: list[int], kind: str) -> OrientedGraph:
    inn = [0] * (n + 1)
    for u in range(1, n + 1):
        for v in iter_members(out[u]):
            inn[v] |= 1 << u
    for v in range(1, n + 1):
        both = out[v] & inn[v]
        if both:
            w = members(both)[0]
            raise DigonError(f"digon between {v} and {w}")
    cls = Tournament if kind == "tournament" else OrientedGraph
    g = cls(n, tuple(out), tuple(inn))
    if kind == "tournament":
        full = g.all
        for v in g.vertices:
            missing = full & ~(out[v] | inn[v] | (1 << v))
            if missing:
                w = members(missing)[0]
                raise MissingArcError(f"pair {{{v}, {w}}} has no arc")
    return g


def build_graph(
    n: int, arcs: Iterable[tuple[int, int]], kind: str = "oriented"
) -> OrientedGraph:
    """Build a tournament or oriented graph from an arc list (1-indexed)."""
    if kind not in ("tournament", "oriented"):
        raise ValueError(f"unknown kind {kind!r}")
    if n < 0:
        raise OutOfRangeError("negative vertex count")
    out = [0] * (n + 1)
    for u, v in arcs:
        if not (1 <= u <= n and 1 <= v <= n):
            raise OutOfRangeError(f"arc ({u}, {v}) outside [1, {n}]")
        if u == v:
            raise LoopError(f"loop at {u}")
        out[u] |= 1 << v
    return _finish(n, out, kind)


def from_out_masks(n: int, out: Sequence[int], kind: str) -> OrientedGraph:
    out = list(out)
    if len(out) != n + 1:
        raise ValueError("out masks must have length n + 1")
    for v in range(1, n + 1):
        if (out[v] >> v) & 1:
            raise LoopError(f"loop at {v}")
    return _finish(n, out, kind)


def from_array(adj: np.ndarray, kind: str = "oriented", check: bool = True) -> OrientedGraph:
    """Build from a dense 0-indexed boolean adjacency array.

    ``check=False`` skips the loop/digon/missing-arc scans for arrays that
    are valid by construction."""
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    if adj.shape != (n, n):
        raise ValueError("adjacency array must be square")
    if check:
        _check_array(adj, kind)
    # bit v of row u-1 <- adj[u-1, v-1]; shift left once so vertex v sits at bit v
    packed = np.packbits(adj, axis=1, bitorder="little")
    out = [0] + [int.from_bytes(row.tobytes(), "little") << 1 for row in packed]
    packed_t = np.packbits(adj.T, axis=1, bitorder="little")
    inn = [0] + [int.from_bytes(row.tobytes(), "little") << 1 for row in packed_t]
    cls = Tournament if kind == "tournament" else OrientedGraph
    return cls(n, tuple(out), tuple(inn))


def _check_array(adj: np.ndarray, kind: str) -> None:
    n = adj.shape[0]
    if n and adj.diagonal().any():
        v = int(np.flatnonzero(adj.diagonal())[0]) + 1
        raise LoopError(f"loop at {v}")
    if (adj & adj.T).any():
        u, v = (int(x) + 1 for x in np.argwhere(adj & adj.T)[0])
        raise DigonError(f"digon between {u} and {v}")
    if kind == "tournament":
        und = adj | adj.T | np.eye(n, dtype=bool)
        if not und.all():
            u, v = (int(x) + 1 for x in np.argwhere(~und)[0])
            raise MissingArcError(f"pair {{{u}, {v}}} has no arc")


def transitive_tournament(n: int) -> Tournament:
    """Tournament with ``u -> v`` iff ``u < v``."""
    full = full_mask(n)
    out = [0] + [full & ~((1 << (v + 1)) - 1) for v in range(1, n + 1)]
    inn = [0] + [((1 << v) - 1) & ~1 for v in range(1, n + 1)]
    return Tournament(n, tuple(out), tuple(inn))


def _coin_flips(n: int, rng: np.random.Generator) -> np.ndarray:
    """Fair n x n boolean array, drawn as packed bytes (one bit per entry)."""
    raw = rng.integers(0, 256, size=(n, (n + 7) // 8), dtype=np.uint8)
    return np.unpackbits(raw, axis=1, count=n).view(bool)


def random_tournament(n: int, rng: np.random.Generator) -> Tournament:
    upper = np.triu(_coin_flips(n, rng), 1)
    adj = upper | np.tril(~upper.T, -1)
    return from_array(adj, "tournament", check=False)


def random_oriented(n: int, rng: np.random.Generator, p: float = 0.5) -> OrientedGraph:
    """Each pair is adjacent with probability ``p``, oriented uniformly."""
    present = np.triu(rng.random((n, n)) < p, 1)
    forward = rng.random((n, n)) < 0.5
    adj = (present & forward) | (present & ~forward).T
    return from_array(adj, "oriented")


def reverse(g: OrientedGraph) -> OrientedGraph:
    return type(g)(g.n, g.inn, g.out)


def relabel(g: OrientedGraph, pi: Sequence[int]) -> OrientedGraph:
    """Rename vertex ``v`` to ``pi[v - 1]``."""
    pi = [int(x) for x in pi]
    if sorted(pi) != list(range(1, g.n + 1)):
        raise ValueError("relabelling must be a permutation of 1..n")
    out = [0] * (g.n + 1)
    for u in g.vertices:
        m = 0
        for v in iter_members(g.out[u]):
            m |= 1 << pi[v - 1]
        out[pi[u - 1]] = m
    return _finish(g.n, out, g.kind)


def induced(g: OrientedGraph, vertices: Sequence[int]) -> OrientedGraph:
    """Induced subgraph, vertex ``vertices[i]`` renamed ``i + 1``."""
    pos = {v: i + 1 for i, v in enumerate(vertices)}
    if len(pos) != len(vertices):
        raise ValueError("repeated vertex")
    out = [0] * (len(vertices) + 1)
    for v, i in pos.items():
        m = 0
        for w in iter_members(g.out[v]):
            j = pos.get(w)
            if j is not None:
                m |= 1 << j
        out[i] = m
    return _finish(len(vertices), out, g.kind)


def independence_number(g: OrientedGraph, max_n: int = INDEPENDENCE_MAX_N) -> int:
    """Exact maximum independent set size of the underlying graph.

    Enumerates independent sets in increasing vertex order with the bound
    ``size + |candidates| <= best``; cost is roughly ``n ** alpha``.
    """
    if g.n > max_n:
        raise SizeLimitError("independence_number", g.n, max_n)
    non = [0] + [g.non_neighbours(v) for v in g.vertices]
    best = 0

    def grow(cand: int, size: int) -> None:
        nonlocal best
        if size > best:
            best = size
        while cand:
            if size + cand.bit_count() <= best:
                return
            low = cand & -cand
            cand ^= low
            grow(cand & non[low.bit_length() - 1], size + 1)

    grow(g.all, 0)
    return best


def chain_order(g: OrientedGraph, s: int | Iterable[int]) -> list[int]:
    """Enumerate a chain so that every earlier vertex beats every later one.

    Raises NotAChain for a non-adjacent pair or a directed cycle inside ``s``.
    """
    smask = _as_mask(s)
    verts = members(smask)
    k = len(verts)
    for v in verts:
        if (g.out[v] | g.inn[v]) & smask != smask & ~(1 << v):
            raise NotAChain(f"vertex {v} has a non-neighbour inside the set")
    verts.sort(key=lambda v: (g.inn[v] & smask).bit_count())
    rest = smask
    for i, v in enumerate(verts):
        rest &= ~(1 << v)
        if (g.inn[v] & smask).bit_count() != i or g.out[v] & smask != rest:
            raise NotAChain("the set contains a directed cycle")
    assert len(verts) == k
    return verts


def is_transitive(g: OrientedGraph) -> bool:
    try:
        chain_order(g, g.all)
    except NotAChain:
        return False
    return True


def _signatures(g: OrientedGraph) -> list[tuple[int, int]]:
    return [(0, 0)] + [
        (g.out[v].bit_count(), g.inn[v].bit_count()) for v in g.vertices
    ]


def canonical_form(g: OrientedGraph, max_n: int = CANONICAL_MAX_N) -> bytes:
    """Isomorphism-invariant byte string.

    The code is the lexicographically least arc string over all relabellings
    that list vertices in non-decreasing (out-degree, in-degree) order. The
    arc string records, for each position ``t`` and each earlier position
    ``j``, the two arc bits between the vertices placed there, so prefixes
    can be compared while the labelling is being built.
    """
    n = g.n
    if n > max_n:
        raise SizeLimitError("canonical_form", n, max_n)
    sig = _signatures(g)
    slots = sorted(sig[1:])
    out = g.out

    def chunk_for(placed: list[int], v: int) -> list[int]:
        chunk = []
        for u in placed:
            chunk.append((out[u] >> v) & 1)
            chunk.append((out[v] >> u) & 1)
        return chunk

    # incumbent: first admissible vertex at every position
    placed: list[int] = []
    best: list[int] = []
    for t in range(n):
        v = next(
            w for w in g.vertices if w not in placed and sig[w] == slots[t]
        )
        best.extend(chunk_for(placed, v))
        placed.append(v)

    placed = []
    code: list[int] = []

    def search(used: int, tight: bool) -> None:
        # tight: the current prefix equals the incumbent's prefix
        nonlocal best
        t = len(placed)
        if t == n:
            if code < best:
                best = code.copy()
            return
        for v in g.vertices:
            if (used >> v) & 1 or sig[v] != slots[t]:
                continue
            chunk = chunk_for(placed, v)
            start = len(code)
            now_tight = False
            if tight:
                ref = best[start:start + len(chunk)]
                if chunk > ref:
                    continue
                now_tight = chunk == ref
            code.extend(chunk)
            placed.append(v)
            search(used | (1 << v), now_tight)
            placed.pop()
            del code[start:]

    search(0, True)
    body = np.packbits(np.array(best, dtype=np.uint8)).tobytes()
    return n.to_bytes(2, "big") + body


def automorphism_count(g: OrientedGraph, max_n: int = AUTOMORPHISM_MAX_N) -> int:
    """Order of the automorphism group, by exhaustive backtracking."""
    n = g.n
    if n > max_n:
        raise SizeLimitError("automorphism_count", n, max_n)
    sig = _signatures(g)
    image = [0] * (n + 1)
    out = g.out
    count = 0

    def extend(v: int, used: int) -> None:
        nonlocal count
        if v > n:
            count += 1
            return
        for w in g.vertices:
            if (used >> w) & 1 or sig[w] != sig[v]:
                continue
            ok = True
            for u in range(1, v):
                iu = image[u]
                if ((out[u] >> v) & 1) != ((out[iu] >> w) & 1) or (
                    (out[v] >> u) & 1
                ) != ((out[w] >> iu) & 1):
                    ok = False
                    break
            if ok:
                image[v] = w
                extend(v + 1, used | (1 << w))

    extend(1, 0)
    return count


def is_isomorphic(g: OrientedGraph, h: OrientedGraph, max_n: int = CANONICAL_MAX_N) -> bool:
    if g.n != h.n or g.arc_count() != h.arc_count():
        return False
    return canonical_form(g, max_n) == canonical_form(h, max_n)


def find_induced_copy(
    host: OrientedGraph, pattern: OrientedGraph
) -> list[int] | None:
    """Injective map from pattern vertices into host preserving arcs and non-arcs.

    Returns ``image`` with ``image[i - 1]`` the host vertex for pattern vertex
    ``i``, or None.
    """
    k = pattern.n
    if k > host.n:
        return None
    image = [0] * (k + 1)
    hout, pout = host.out, pattern.out
    psig = _signatures(pattern)
    hsig = _signatures(host)

    def extend(i: int, used: int) -> bool:
        if i > k:
            return True
        for w in host.vertices:
            if (used >> w) & 1:
                continue
            # induced copy: pattern degrees cannot exceed host degrees
            if hsig[w][0] < psig[i][0] or hsig[w][1] < psig[i][1]:
                continue
            ok = True
            for j in range(1, i):
                wj = image[j]
                if ((pout[j] >> i) & 1) != ((hout[wj] >> w) & 1) or (
                    (pout[i] >> j) & 1
                ) != ((hout[w] >> wj) & 1):
                    ok = False
                    break
            if ok:
                image[i] = w
                if extend(i + 1, used | (1 << w)):
                    return True
        return False

    return image[1:] if extend(1, 0) else None
