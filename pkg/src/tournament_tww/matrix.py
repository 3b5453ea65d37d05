"""Matrices over small alphabets, divisions, grids and rank divisions.

Rows and columns are 0-indexed inside a :class:`Matrix`; a :class:`Division`
stores the 0-based start index of every part except the first.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .errors import DivisionShape, SizeLimitError
from .graph import OrientedGraph
from .permutation import Permutation

RANK_EXACT_MAX_SIZE = 48
RANK_EXACT_MAX_K = 4
# beyond the size cap, row cuts are still enumerated exhaustively when there are few
RANK_COMBINATION_BUDGET = 5000


@dataclass(frozen=True)
class Matrix:
    entries: tuple[tuple[int, ...], ...]
    cols: int
    alphabet: int = 2

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.entries)
        for r in rows:
            if len(r) != self.cols:
                raise ValueError("ragged matrix")
            for x in r:
                if not 0 <= x < self.alphabet:
                    raise ValueError(f"entry {x} outside alphabet of size {self.alphabet}")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]], alphabet: int | None = None) -> Matrix:
        rows = [list(r) for r in rows]
        cols = len(rows[0]) if rows else 0
        if alphabet is None:
            alphabet = max(2, 1 + max((max(r) for r in rows if r), default=0))
        return cls(tuple(map(tuple, rows)), cols, alphabet)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Matrix:
        return cls(tuple((0,) * cols for _ in range(rows)), cols)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls.of([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def rows(self) -> int:
        return len(self.entries)

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.entries[r][c]

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> Matrix:
        cols = list(cols)
        return Matrix(
            tuple(tuple(self.entries[r][c] for c in cols) for r in rows),
            len(cols),
            self.alphabet,
        )

    def transpose(self) -> Matrix:
        return Matrix(
            tuple(tuple(self.entries[r][c] for r in range(self.rows)) for c in range(self.cols)),
            self.rows,
            self.alphabet,
        )

    def complement(self) -> Matrix:
        if self.alphabet != 2:
            raise ValueError("complement needs a 0/1 matrix")
        return Matrix(tuple(tuple(1 - x for x in r) for r in self.entries), self.cols)

    def reverse_rows(self) -> Matrix:
        return Matrix(self.entries[::-1], self.cols, self.alphabet)

    def reverse_cols(self) -> Matrix:
        return Matrix(tuple(r[::-1] for r in self.entries), self.cols, self.alphabet)

    def delete_row(self, r: int) -> Matrix:
        return Matrix(self.entries[:r] + self.entries[r + 1:], self.cols, self.alphabet)

    def delete_col(self, c: int) -> Matrix:
        return Matrix(
            tuple(row[:c] + row[c + 1:] for row in self.entries),
            self.cols - 1,
            self.alphabet,
        )


@dataclass(frozen=True)
class Division:
    row_cuts: tuple[int, ...]
    col_cuts: tuple[int, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_cuts) + 1, len(self.col_cuts) + 1

    def row_parts(self, rows: int) -> list[range]:
        return _parts(self.row_cuts, rows)

    def col_parts(self, cols: int) -> list[range]:
        return _parts(self.col_cuts, cols)

    def check(self, m: Matrix) -> None:
        for cuts, size in ((self.row_cuts, m.rows), (self.col_cuts, m.cols)):
            prev = 0
            for c in cuts:
                if not prev < c < size:
                    raise DivisionShape(f"cut {c} out of order or range for size {size}")
                prev = c
            if size == 0:
                raise DivisionShape("cannot divide an empty dimension")


def _parts(cuts: Sequence[int], size: int) -> list[range]:
    bounds = (0, *cuts, size)
    return [range(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]


def adjacency_matrix(
    g: OrientedGraph,
    order: Sequence[int],
    extra: Sequence[Sequence[int]] = (),
) -> Matrix:
    """Entry ``(u, v)`` has bit 0 set iff ``u -> v``, bit ``i`` iff ``(u, v)`` is
    in the ``i``-th extra relation (given as out-masks indexed by vertex).

    Rows and columns follow ``order``.
    """
    if sorted(order) != list(g.vertices):
        raise ValueError("order must list every vertex once")
    rels = [g.out, *extra]
    rows = []
    for u in order:
        row = []
        for v in order:
            x = 0
            for b, rel in enumerate(rels):
                x |= ((rel[u] >> v) & 1) << b
            row.append(x)
        rows.append(tuple(row))
    return Matrix(tuple(rows), len(order), 2 ** len(rels))


def is_k_grid(m: Matrix, d: Division, k: int) -> bool:
    if d.shape != (k, k):
        raise DivisionShape(f"division is {d.shape[0]}x{d.shape[1]}, expected {k}x{k}")
    d.check(m)
    for rp in d.row_parts(m.rows):
        for cp in d.col_parts(m.cols):
            if not any(m.entries[r][c] == 1 for r in rp for c in cp):
                return False
    return True


def diversity(m: Matrix) -> tuple[int, int]:
    """(number of distinct rows, number of distinct columns)."""
    rows = set(m.entries)
    cols = {tuple(r[c] for r in m.entries) for c in range(m.cols)}
    return len(rows), len(cols)


def cell(m: Matrix, rows: range, cols: range) -> Matrix:
    return m.submatrix(rows, cols)


def is_rank_division(m: Matrix, d: Division, k: int) -> bool:
    """Every cell of ``d`` has at least k distinct rows and k distinct columns."""
    d.check(m)
    for rp in d.row_parts(m.rows):
        for cp in d.col_parts(m.cols):
            r, c = diversity(m.submatrix(rp, cp))
            if r < k or c < k:
                return False
    return True


@dataclass(frozen=True)
class RankDivisionResult:
    status: str  # "found", "not_found" or "unknown"
    division: Division | None
    exact: bool

    @property
    def found(self) -> bool:
        return self.status == "found"


def _greedy_columns(m: Matrix, row_parts: list[range], parts: int, k: int) -> tuple[int, ...] | None:
    """Shortest-prefix column cuts making every cell k-diverse, or None.

    k-diversity of a cell only grows when its column interval grows, so the
    greedy choice is optimal for fixed row parts.
    """
    ent, ncols, base = m.entries, m.cols, m.alphabet
    cuts: list[int] = []
    c = 0
    for part in range(parts):
        last = part == parts - 1
        # rows are identified by their entries so far, read as base-alphabet integers
        codes = [[0] * len(rp) for rp in row_parts]
        colsets: list[set] = [set() for _ in row_parts]

        def diverse() -> bool:
            return all(
                len(colsets[p]) >= k and len(set(codes[p])) >= k
                for p in range(len(row_parts))
            )

        end, ok = c, False
        while end < ncols:
            for p, rp in enumerate(row_parts):
                col = tuple(ent[r][end] for r in rp)
                colsets[p].add(col)
                cp = codes[p]
                for i, x in enumerate(col):
                    cp[i] = cp[i] * base + x
            end += 1
            if not last and diverse():
                ok = True
                break
        if last:
            return tuple(cuts) if end > c and diverse() else None
        if not ok or end >= ncols:
            return None
        cuts.append(end)
        c = end
    return tuple(cuts)


def _row_cut_candidates(rows: int, parts: int, k: int, limit: int | None, seed: int):
    """All admissible row cuts, or a deterministic sample of ``limit`` of them."""
    def admissible(cuts):
        bounds = (0, *cuts, rows)
        return all(bounds[i + 1] - bounds[i] >= k for i in range(parts))

    if limit is None:
        for cuts in combinations(range(1, rows), parts - 1):
            if admissible(cuts):
                yield cuts
        return
    rnd = random.Random(seed)
    seen = set()
    even = tuple(round(rows * i / parts) for i in range(1, parts))
    if len(set(even)) == parts - 1 and admissible(even):
        seen.add(even)
        yield even
    for _ in range(limit * 4):
        if len(seen) >= limit:
            break
        cuts = tuple(sorted(rnd.sample(range(1, rows), parts - 1)))
        if cuts in seen or not admissible(cuts):
            continue
        seen.add(cuts)
        yield cuts


def find_rank_division(
    m: Matrix,
    k: int,
    parts: int | None = None,
    *,
    max_size: int = RANK_EXACT_MAX_SIZE,
    max_k: int = RANK_EXACT_MAX_K,
    combination_budget: int = RANK_COMBINATION_BUDGET,
    samples: int = 400,
    seed: int = 0,
) -> RankDivisionResult:
    """Search a division into ``parts x parts`` cells (default ``k``) whose
    cells are all k-diverse.

    Row cuts are enumerated; for each, column cuts are chosen greedily, which
    is exact. The search is exhaustive when the matrix is within the size
    caps or has few enough row-cut choices; otherwise a deterministic sample
    of row cuts is tried and a miss is reported as "unknown".
    """
    if k < 1:
        raise ValueError("k must be positive")
    parts = k if parts is None else parts
    if m.rows < parts or m.cols < parts:
        return RankDivisionResult("not_found", None, True)
    exhaustive = (m.rows + m.cols <= max_size and k <= max_k) or comb(
        m.rows - 1, parts - 1
    ) <= combination_budget
    limit = None if exhaustive else samples
    for cuts in _row_cut_candidates(m.rows, parts, k, limit, seed):
        row_parts = _parts(cuts, m.rows)
        col_cuts = _greedy_columns(m, row_parts, parts, k)
        if col_cuts is not None:
            return RankDivisionResult("found", Division(cuts, col_cuts), exhaustive)
    return RankDivisionResult("not_found" if exhaustive else "unknown", None, exhaustive)


def find_grid_division(m: Matrix, k: int, combination_budget: int = 200_000) -> Division | None:
    """A k-division with a non-zero entry in every cell, or None (exhaustive).

    Row cuts are enumerated; column cuts are greedy shortest prefixes, which
    is exact because "the cell holds a non-zero" is monotone in the interval.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if m.rows < k or m.cols < k:
        return None
    if comb(m.rows - 1, k - 1) > combination_budget:
        raise SizeLimitError("find_grid_division", comb(m.rows - 1, k - 1), combination_budget)
    nz_rows = [[r for r in range(m.rows) if m.entries[r][c]] for c in range(m.cols)]
    row_of = [0] * m.rows
    need = (1 << k) - 1
    for cuts in combinations(range(1, m.rows), k - 1):
        bounds = (0, *cuts, m.rows)
        for p in range(k):
            for r in range(bounds[p], bounds[p + 1]):
                row_of[r] = p
        col_cuts, c = [], 0
        for part in range(k):
            seen = 0
            while c < m.cols and (seen != need or part == k - 1):
                for r in nz_rows[c]:
                    seen |= 1 << row_of[r]
                c += 1
            if seen != need:
                break
            if part < k - 1:
                col_cuts.append(c)
        else:
            return Division(cuts, tuple(col_cuts))
    return None


class MatrixClassKind(str, enum.Enum):
    EQ = "="
    NE = "!="
    LE_R = "<=R"
    GE_R = ">=R"
    LE_C = "<=C"
    GE_C = ">=C"


def build_M(s: MatrixClassKind | str, sigma: Permutation) -> Matrix:
    """The n x n encoding of sigma of class ``s`` (rows i, columns j, 1-indexed)."""
    s = MatrixClassKind(s)
    n = sigma.n
    inv = sigma.inverse()
    tests = {
        MatrixClassKind.EQ: lambda i, j: j == sigma(i),
        MatrixClassKind.NE: lambda i, j: j != sigma(i),
        MatrixClassKind.LE_R: lambda i, j: j <= sigma(i),
        MatrixClassKind.GE_R: lambda i, j: j >= sigma(i),
        MatrixClassKind.LE_C: lambda i, j: i <= inv(j),
        MatrixClassKind.GE_C: lambda i, j: i >= inv(j),
    }
    f = tests[s]
    return Matrix(
        tuple(tuple(int(f(i, j)) for j in range(1, n + 1)) for i in range(1, n + 1)),
        n,
    )


def _flip(n: int) -> Permutation:
    return Permutation.reverse(n)


# reversing rows maps (s, sigma) to (s', sigma o flip); reversing columns to (s'', flip o sigma)
_ROW_REVERSAL = {
    MatrixClassKind.EQ: MatrixClassKind.EQ,
    MatrixClassKind.NE: MatrixClassKind.NE,
    MatrixClassKind.LE_R: MatrixClassKind.LE_R,
    MatrixClassKind.GE_R: MatrixClassKind.GE_R,
    MatrixClassKind.LE_C: MatrixClassKind.GE_C,
    MatrixClassKind.GE_C: MatrixClassKind.LE_C,
}
_COL_REVERSAL = {
    MatrixClassKind.EQ: MatrixClassKind.EQ,
    MatrixClassKind.NE: MatrixClassKind.NE,
    MatrixClassKind.LE_R: MatrixClassKind.GE_R,
    MatrixClassKind.GE_R: MatrixClassKind.LE_R,
    MatrixClassKind.LE_C: MatrixClassKind.LE_C,
    MatrixClassKind.GE_C: MatrixClassKind.GE_C,
}


@dataclass(frozen=True)
class Normalization:
    kind: MatrixClassKind
    sigma: Permutation
    log: tuple[tuple, ...]


def apply_log(m: Matrix, log: Iterable[tuple]) -> Matrix:
    """Replay a transform log produced by :func:`normalize_matrix_class`."""
    for step in log:
        op = step[0]
        if op == "reverse_rows":
            m = m.reverse_rows()
        elif op == "reverse_cols":
            m = m.reverse_cols()
        elif op == "transpose_complement":
            m = m.transpose().complement()
        elif op == "delete_row":
            m = m.delete_row(step[1])
        elif op == "delete_col":
            m = m.delete_col(step[1])
        else:
            raise ValueError(f"unknown transform {op!r}")
    return m


def _zero_lines(m: Matrix) -> tuple[list[int], list[int]]:
    rows = [r for r in range(m.rows) if not any(m.entries[r])]
    cols = [c for c in range(m.cols) if not any(row[c] for row in m.entries)]
    return rows, cols


def normalize_matrix_class(
    s: MatrixClassKind | str,
    sigma: Permutation,
    reverse_rows: bool = False,
    reverse_cols: bool = False,
) -> Normalization:
    """Bring ``build_M(s, sigma)`` to one of the classes =, <=R, >=R.

    Requested reversals are applied first. The classes !=, <=C, >=C are then
    transposed and complemented; for <=C and >=C this leaves a strict
    variant whose single all-zero row and column are located and deleted.
    The log replays on ``build_M(s, sigma)`` to give exactly
    ``build_M(kind, sigma')``.
    """
    s = MatrixClassKind(s)
    n = sigma.n
    log: list[tuple] = []
    if reverse_rows:
        s, sigma = _ROW_REVERSAL[s], sigma.compose(_flip(n))
        log.append(("reverse_rows",))
    if reverse_cols:
        s, sigma = _COL_REVERSAL[s], _flip(n).compose(sigma)
        log.append(("reverse_cols",))
    if s in (MatrixClassKind.EQ, MatrixClassKind.LE_R, MatrixClassKind.GE_R):
        return Normalization(s, sigma, tuple(log))

    log.append(("transpose_complement",))
    inv = sigma.inverse()
    if s is MatrixClassKind.NE:
        return Normalization(MatrixClassKind.EQ, inv, tuple(log))

    strict = build_M(s, sigma).transpose().complement()
    zero_rows, zero_cols = _zero_lines(strict)
    if len(zero_rows) != 1 or len(zero_cols) != 1:
        raise AssertionError("strict class must have exactly one zero row and column")
    r0, c0 = zero_rows[0], zero_cols[0]
    log += [("delete_row", r0), ("delete_col", c0)]
    # surviving rows keep inv(i); values shift down by one for <=C's >R form
    kept = [inv(i) for i in range(1, n + 1) if i - 1 != r0]
    if s is MatrixClassKind.LE_C:
        # entries (i, j) with j > inv(i); the zero column is column 1
        target = MatrixClassKind.GE_R
        values = kept
    else:
        # entries (i, j) with j < inv(i); the zero column is column n
        target = MatrixClassKind.LE_R
        values = [v - 1 for v in kept]
    return Normalization(target, Permutation(tuple(values)), tuple(log))
