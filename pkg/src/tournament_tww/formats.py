"""Text formats (all 1-indexed). Readers raise :class:`ParseError` with the
offending line number; writers produce what the readers accept."""

from __future__ import annotations

from typing import Iterable, Iterator

from .bst import BINARY, TERNARY, BstTree
from .chain_order import IntervalFamily
from .errors import ParseError
from .graph import OrientedGraph, build_graph
from .matrix import Matrix
from .permutation import Permutation
from .twin_width import ContractionSequence


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        yield no, s.split()


def _ints(tokens: list[str], line: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"integer expected, got {' '.join(tokens)!r}", line) from None


def _header(it, tag: str, count: int | None):
    try:
        no, toks = next(it)
    except StopIteration:
        raise ParseError(f"missing '{tag}' header", 1) from None
    if toks[0] != tag or (count is not None and len(toks) != count + 1):
        raise ParseError(f"expected '{tag}' header", no)
    return no, toks[1:]


def _finish(it):
    for no, _ in it:
        raise ParseError("unexpected trailing line", no)


# digraphs


def read_digraph(text: str, kind: str = "tournament") -> OrientedGraph:
    it = _lines(text)
    no, toks = _header(it, "p", 3)
    if toks[0] != "dtw":
        raise ParseError("expected 'p dtw <n> <m>'", no)
    n, m = _ints(toks[1:], no)
    arcs = []
    last = no
    for no, toks in it:
        last = no
        if toks[0] != "a" or len(toks) != 3:
            raise ParseError("expected 'a <u> <v>'", no)
        u, v = _ints(toks[1:], no)
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(f"vertex out of range 1..{n}", no)
        arcs.append((u, v))
    if len(arcs) != m:
        raise ParseError(f"header announces {m} arcs, found {len(arcs)}", last)
    return build_graph(n, arcs, kind)


def write_digraph(g: OrientedGraph) -> str:
    arcs = g.arcs()
    out = [f"p dtw {g.n} {len(arcs)}"]
    out += [f"a {u} {v}" for u, v in arcs]
    return "\n".join(out) + "\n"


# permutations


def read_permutation(text: str) -> Permutation:
    it = _lines(text)
    no, toks = _header(it, "s", 1)
    (n,) = _ints(toks, no)
    vals: list[int] = []
    for no, toks in it:
        if len(vals) >= n and n:
            raise ParseError("unexpected trailing line", no)
        vals += _ints(toks, no)
    if len(vals) != n:
        raise ParseError(f"expected {n} values, found {len(vals)}", no)
    try:
        return Permutation(tuple(vals))
    except ValueError as exc:
        raise ParseError(str(exc), no) from None


def write_permutation(p: Permutation) -> str:
    return f"s {p.n}\n{' '.join(map(str, p.image))}\n"


# matrices


def read_matrix(text: str) -> Matrix:
    it = _lines(text)
    no, toks = _header(it, "m", 2)
    rows, cols = _ints(toks, no)
    entries = []
    for no, toks in it:
        if len(toks) != 1 or not toks[0].isdigit() or len(toks[0]) != cols:
            raise ParseError(f"expected a string of {cols} digits", no)
        entries.append([int(ch) for ch in toks[0]])
    if len(entries) != rows:
        raise ParseError(f"expected {rows} rows, found {len(entries)}", no)
    return Matrix.of(entries)


def write_matrix(m: Matrix) -> str:
    out = [f"m {m.rows} {m.cols}"]
    out += ["".join(map(str, row)) for row in m.entries]
    return "\n".join(out) + "\n"


# search trees


def read_bst(text: str) -> BstTree:
    it = _lines(text)
    no, toks = _header(it, "t", 2)
    arity = toks[1]
    if arity not in (BINARY, TERNARY):
        raise ParseError("arity must be binary or ternary", no)
    (n,) = _ints(toks[:1], no)
    no, toks = _header(it, "r", 1)
    (root,) = _ints(toks, no)
    width = 4 if arity == TERNARY else 3
    left, center, right = [0] * (n + 1), [0] * (n + 1), [0] * (n + 1)
    seen = set()
    for no, toks in it:
        if toks[0] != "v" or len(toks) != width + 1:
            raise ParseError(f"expected 'v' with {width} numbers", no)
        vals = _ints(toks[1:], no)
        v = vals[0]
        if not 1 <= v <= n or v in seen:
            raise ParseError(f"bad or repeated node {v}", no)
        seen.add(v)
        if any(not 0 <= c <= n for c in vals[1:]):
            raise ParseError("child out of range", no)
        if arity == TERNARY:
            left[v], center[v], right[v] = vals[1:]
        else:
            left[v], right[v] = vals[1:]
    if len(seen) != n:
        raise ParseError(f"expected {n} node lines, found {len(seen)}", no)
    try:
        return BstTree(arity, root, tuple(left), tuple(center), tuple(right))
    except Exception as exc:
        raise ParseError(str(exc), no) from None


def write_bst(t: BstTree) -> str:
    out = [f"t {t.n} {t.arity}", f"r {t.root}"]
    for v in range(1, t.n + 1):
        if t.arity == TERNARY:
            out.append(f"v {v} {t.left[v]} {t.center[v]} {t.right[v]}")
        else:
            out.append(f"v {v} {t.left[v]} {t.right[v]}")
    return "\n".join(out) + "\n"


# interval families


def read_family(text: str) -> IntervalFamily:
    it = _lines(text)
    no, toks = _header(it, "f", 1)
    (count,) = _ints(toks, no)
    parts = [_ints(toks, no) for no, toks in it]
    if len(parts) != count:
        raise ParseError(f"expected {count} parts, found {len(parts)}", no)
    return IntervalFamily.of(parts)


def write_family(f: IntervalFamily | Iterable[Iterable[int]]) -> str:
    parts = f.parts if isinstance(f, IntervalFamily) else [tuple(p) for p in f]
    out = [f"f {len(parts)}"] + [" ".join(map(str, p)) for p in parts]
    return "\n".join(out) + "\n"


# contraction sequences


def read_sequence(text: str) -> ContractionSequence:
    it = _lines(text)
    no, toks = _header(it, "cs", 1)
    (n,) = _ints(toks, no)
    merges = []
    for no, toks in it:
        if len(toks) != 2:
            raise ParseError("expected '<u> <v>'", no)
        u, v = _ints(toks, no)
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(f"vertex out of range 1..{n}", no)
        merges.append((u, v))
    if len(merges) != max(n - 1, 0):
        raise ParseError(f"expected {max(n - 1, 0)} merges, found {len(merges)}", no)
    return ContractionSequence(n, tuple(merges))


def write_sequence(seq: ContractionSequence) -> str:
    out = [f"cs {seq.n}"] + [f"{u} {v}" for u, v in seq.merges]
    return "\n".join(out) + "\n"
