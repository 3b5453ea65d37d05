"""Permutations in one-line notation, bi-orders, patterns and grids."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Callable, Hashable, Iterator, Sequence

from .errors import SizeLimitError

PATTERN_MAX = 8
GRID_MAX_N = 64
UNIFORM_PATTERN_MAX = 4


@dataclass(frozen=True)
class Permutation:
    """``image[i - 1] = sigma(i)``; values are ``1..n``."""

    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(x) for x in self.image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise ValueError(f"not a permutation of 1..{len(image)}: {image}")
        object.__setattr__(self, "image", image)

    @classmethod
    def of(cls, values: Sequence[int] | str) -> Permutation:
        """``Permutation.of("31452")`` or ``Permutation.of([3, 1, 4, 5, 2])``."""
        if isinstance(values, str):
            values = [int(c) for c in values.replace(" ", "")]
        return cls(tuple(values))

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def reverse(cls, n: int) -> Permutation:
        return cls(tuple(range(n, 0, -1)))

    @property
    def n(self) -> int:
        return len(self.image)

    def __len__(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def __str__(self) -> str:
        if self.n < 10:
            return "".join(map(str, self.image))
        return " ".join(map(str, self.image))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, v in enumerate(self.image, 1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    def compose(self, other: Permutation) -> Permutation:
        """``(self o other)(i) = self(other(i))``."""
        return Permutation(tuple(self.image[j - 1] for j in other.image))

    def restrict(self, indices: Sequence[int]) -> Permutation:
        """Pattern formed by the positions ``indices`` (any order, sorted first)."""
        idx = sorted(indices)
        vals = [self.image[i - 1] for i in idx]
        rank = {v: r for r, v in enumerate(sorted(vals), 1)}
        return Permutation(tuple(rank[v] for v in vals))

    def matrix(self) -> list[list[int]]:
        """Permutation matrix with a 1 at ``(i, sigma(i))``."""
        return [[1 if j == v else 0 for j in range(1, self.n + 1)] for v in self.image]


def all_permutations(n: int) -> Iterator[Permutation]:
    for p in permutations(range(1, n + 1)):
        yield Permutation(p)


def grid_permutation(k: int) -> Permutation:
    """The permutation on ``k*k`` points with ``sigma(k*i + j + 1) = k*j + i + 1``."""
    img = [0] * (k * k)
    for i in range(k):
        for j in range(k):
            img[k * i + j] = k * j + i + 1
    return Permutation(tuple(img))


def order_type(x: int, y: int) -> int:
    return (x < y) - (x > y)


@dataclass(frozen=True)
class BiOrder:
    """``[n]`` with the natural order and ``i <_sigma j`` iff ``sigma(i) < sigma(j)``."""

    perm: Permutation

    @property
    def n(self) -> int:
        return self.perm.n

    def ot1(self, x: int, y: int) -> int:
        return order_type(x, y)

    def ot2(self, x: int, y: int) -> int:
        return order_type(self.perm(x), self.perm(y))


@dataclass(frozen=True)
class PairColoring:
    """Colour of each ordered pair ``(x, y)`` with ``x != y``."""

    n: int
    colour: Callable[[int, int], Hashable]

    @classmethod
    def from_table(cls, table: Sequence[Sequence[Hashable]]) -> PairColoring:
        """``table[x - 1][y - 1]``; the diagonal is ignored."""
        rows = [tuple(r) for r in table]
        return cls(len(rows), lambda x, y: rows[x - 1][y - 1])

    def __call__(self, x: int, y: int) -> Hashable:
        return self.colour(x, y)


def _pattern_witnesses(sigma: Permutation, tau: Permutation) -> Iterator[tuple[int, ...]]:
    """Increasing index sets of sigma realising tau, in lexicographic order."""
    n, k = sigma.n, tau.n
    img, timg = sigma.image, tau.image
    chosen: list[int] = []

    def extend(start: int) -> Iterator[tuple[int, ...]]:
        t = len(chosen)
        if t == k:
            yield tuple(chosen)
            return
        for i in range(start, n - (k - t) + 2):
            v = img[i - 1]
            if all(
                (v > img[chosen[s] - 1]) == (timg[t] > timg[s]) for s in range(t)
            ):
                chosen.append(i)
                yield from extend(i + 1)
                chosen.pop()

    yield from extend(1)


def contains_pattern(
    sigma: Permutation, tau: Permutation, max_k: int = PATTERN_MAX
) -> tuple[int, ...] | None:
    """Lexicographically least index set ``X`` of sigma with ``O_sigma[X] ~ O_tau``."""
    if tau.n > max_k:
        raise SizeLimitError("contains_pattern", tau.n, max_k)
    if tau.n > sigma.n:
        return None
    return next(_pattern_witnesses(sigma, tau), None)


def _column_cover(row_of: Sequence[int], cols_ones: Sequence[list[int]], k: int, parts: int) -> bool:
    """Can the columns be cut into ``parts`` intervals each meeting all ``k`` row parts?

    ``cols_ones[c]`` lists the rows holding a 1 in column ``c``; ``row_of``
    maps a row to its part. Greedy shortest prefixes are optimal because
    covering is monotone under enlarging an interval.
    """
    need = (1 << k) - 1
    c, ncols = 0, len(cols_ones)
    for _ in range(parts - 1):
        seen = 0
        while c < ncols and seen != need:
            for r in cols_ones[c]:
                seen |= 1 << row_of[r]
            c += 1
        if seen != need:
            return False
    seen = 0
    while c < ncols:
        for r in cols_ones[c]:
            seen |= 1 << row_of[r]
        c += 1
    return seen == need


def has_grid(sigma: Permutation, k: int) -> bool:
    """True iff some k-division of the permutation matrix has a 1 in every cell."""
    n = sigma.n
    if k <= 0:
        return True
    if k * k > n:
        return False
    cols_ones: list[list[int]] = [[] for _ in range(n)]
    for i, v in enumerate(sigma.image):
        cols_ones[v - 1].append(i)
    row_of = [0] * n
    for cuts in combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        # each row part needs at least k ones, one per column part
        if any(bounds[p + 1] - bounds[p] < k for p in range(k)):
            continue
        for p in range(k):
            for r in range(bounds[p], bounds[p + 1]):
                row_of[r] = p
        if _column_cover(row_of, cols_ones, k, k):
            return True
    return False


def max_grid(sigma: Permutation, max_n: int = GRID_MAX_N) -> int:
    """Largest k such that sigma contains a k-grid (0 for the empty permutation).

    Grids are monotone in k, so the search stops at the first failure.
    """
    if sigma.n > max_n:
        raise SizeLimitError("max_grid", sigma.n, max_n)
    k = 0
    while has_grid(sigma, k + 1):
        k += 1
    return k


@dataclass(frozen=True)
class UniformPattern:
    indices: tuple[int, ...]
    table: dict[tuple[int, int], Hashable]


def find_pattern_with_uniform_coloring(
    b: BiOrder,
    colouring: PairColoring,
    sigma: Permutation,
    max_k: int = UNIFORM_PATTERN_MAX,
) -> UniformPattern | None:
    """Copy ``X`` of ``O_sigma`` inside ``b`` on which the colouring factors
    through the pair of order types.

    ``table[(ot, ot2)]`` is the colour of every ordered pair of ``X`` with
    those order types. Exhaustive; None when no such copy exists.
    """
    if sigma.n > max_k:
        raise SizeLimitError("find_pattern_with_uniform_coloring", sigma.n, max_k)
    if sigma.n > b.n:
        return None
    for X in _pattern_witnesses(b.perm, sigma):
        table: dict[tuple[int, int], Hashable] = {}
        ok = True
        for x in X:
            for y in X:
                if x == y:
                    continue
                key = (b.ot1(x, y), b.ot2(x, y))
                c = colouring(x, y)
                if table.setdefault(key, c) != c:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return UniformPattern(X, table)
    return None
