from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tournament_tww.errors import SizeLimitError
from tournament_tww.permutation import (
    BiOrder,
    PairColoring,
    Permutation,
    all_permutations,
    contains_pattern,
    find_pattern_with_uniform_coloring,
    grid_permutation,
    has_grid,
    max_grid,
    order_type,
)


def test_order_type():
    assert order_type(2, 5) == 1
    assert order_type(5, 5) == 0
    assert order_type(7, 3) == -1


def test_permutation_basics():
    p = Permutation.of("31452")
    assert p(1) == 3 and p.n == 5
    assert p.compose(p.inverse()) == Permutation.identity(5)
    with pytest.raises(ValueError):
        Permutation.of([1, 1, 2])


def standardize(vals):
    ranks = {v: i for i, v in enumerate(sorted(vals), 1)}
    return tuple(ranks[v] for v in vals)


def brute_patterns(sigma, tau):
    return [
        X for X in combinations(range(1, sigma.n + 1), tau.n)
        if standardize([sigma(i) for i in X]) == tau.image
    ]


def test_contains_pattern_examples():
    assert contains_pattern(Permutation.identity(5), Permutation.identity(3)) == (1, 2, 3)
    assert contains_pattern(Permutation.of("21"), Permutation.of("12")) is None
    w = contains_pattern(Permutation.of("31452"), Permutation.of("231"))
    assert w == (1, 3, 5)
    assert w == brute_patterns(Permutation.of("31452"), Permutation.of("231"))[0]


def test_contains_pattern_against_brute(rng):
    for _ in range(100):
        n = int(rng.integers(1, 8))
        k = int(rng.integers(1, min(n, 4) + 1))
        sigma = Permutation(tuple(int(x) + 1 for x in rng.permutation(n)))
        tau = Permutation(tuple(int(x) + 1 for x in rng.permutation(k)))
        found = brute_patterns(sigma, tau)
        assert contains_pattern(sigma, tau) == (found[0] if found else None)


def test_contains_pattern_cap():
    with pytest.raises(SizeLimitError):
        contains_pattern(Permutation.identity(20), Permutation.identity(12), max_k=8)


@settings(max_examples=40, deadline=None)
@given(st.permutations(list(range(1, 8))))
def test_self_pattern(vals):
    p = Permutation(tuple(vals))
    assert contains_pattern(p, p) == tuple(range(1, 8))


def brute_has_grid(sigma, k):
    n = sigma.n
    for rc in combinations(range(1, n), k - 1):
        rb = (0, *rc, n)
        for cc in combinations(range(1, n), k - 1):
            cb = (0, *cc, n)
            if all(
                any(cb[j] < sigma(i) <= cb[j + 1] for i in range(rb[a] + 1, rb[a + 1] + 1))
                for a in range(k)
                for j in range(k)
            ):
                return True
    return False


def test_max_grid_examples():
    for k in (2, 3, 4):
        assert max_grid(grid_permutation(k)) >= k
    assert grid_permutation(3).image == (1, 4, 7, 2, 5, 8, 3, 6, 9)
    for n in range(1, 8):
        assert max_grid(Permutation.identity(n)) == 1
    assert max_grid(Permutation.reverse(6)) == 1


def test_has_grid_against_brute():
    for n in range(1, 7):
        for sigma in all_permutations(n):
            for k in (2, 3):
                if k * k <= n or k == 2:
                    assert has_grid(sigma, k) == brute_has_grid(sigma, k), (sigma, k)


def test_max_grid_monotone_under_patterns(rng):
    for _ in range(40):
        sigma = Permutation(tuple(int(x) + 1 for x in rng.permutation(6)))
        for k in range(1, 6):
            for X in combinations(range(1, 7), k):
                tau = Permutation(standardize([sigma(i) for i in X]))
                assert max_grid(tau) <= max_grid(sigma)


def test_uniform_pattern_examples():
    sigma = Permutation.of("2413")
    const = PairColoring(4, lambda x, y: 0)
    res = find_pattern_with_uniform_coloring(BiOrder(sigma), const, sigma)
    assert res.indices == (1, 2, 3, 4)
    assert set(res.table.values()) == {0}
    assert find_pattern_with_uniform_coloring(BiOrder(Permutation.of("21")), const, Permutation.of("231")) is None

    lam = PairColoring(4, lambda x, y: int(x < y))
    res = find_pattern_with_uniform_coloring(BiOrder(Permutation.of("2143")), lam, Permutation.of("21"))
    assert res is not None
    for (ot1, _), c in res.table.items():
        assert c == int(ot1 == 1)


def test_uniform_pattern_reverification(rng):
    for _ in range(30):
        n = int(rng.integers(3, 8))
        b = BiOrder(Permutation(tuple(int(x) + 1 for x in rng.permutation(n))))
        table = rng.integers(0, 2, size=(n, n)).tolist()
        lam = PairColoring.from_table(table)
        sigma = Permutation(tuple(int(x) + 1 for x in rng.permutation(2)))
        res = find_pattern_with_uniform_coloring(b, lam, sigma)
        if res is None:
            continue
        X = res.indices
        assert standardize([b.perm(i) for i in X]) == sigma.image
        for x in X:
            for y in X:
                if x != y:
                    assert res.table[(b.ot1(x, y), b.ot2(x, y))] == lam(x, y)


def test_uniform_pattern_cap():
    with pytest.raises(SizeLimitError):
        find_pattern_with_uniform_coloring(
            BiOrder(Permutation.identity(6)), PairColoring(6, lambda x, y: 0), Permutation.identity(5)
        )
