from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_tournaments, brute_isomorphic, c3
from tournament_tww.errors import DigonError, LoopError, MissingArcError, NotAChain, OutOfRangeError, SizeLimitError
from tournament_tww.graph import (
    automorphism_count,
    build_graph,
    canonical_form,
    chain_order,
    find_induced_copy,
    independence_number,
    induced,
    is_isomorphic,
    is_transitive,
    mask_of,
    random_oriented,
    random_tournament,
    relabel,
    transitive_tournament,
)


def test_build_c3():
    g = c3()
    assert g.is_tournament()
    assert g.arcs() == [(1, 2), (2, 3), (3, 1)]


def test_build_errors():
    with pytest.raises(MissingArcError):
        build_graph(3, [(1, 2), (2, 3)], "tournament")
    with pytest.raises(DigonError):
        build_graph(2, [(1, 2), (2, 1)], "oriented")
    with pytest.raises(LoopError):
        build_graph(2, [(1, 1)], "oriented")
    with pytest.raises(OutOfRangeError):
        build_graph(2, [(1, 3)], "oriented")


def test_tournament_xor(rng):
    for n in range(1, 12):
        g = random_tournament(n, rng)
        for u, v in combinations(g.vertices, 2):
            assert g.has_arc(u, v) != g.has_arc(v, u)


def brute_alpha(g):
    best = 0
    for mask in range(1 << g.n):
        vs = [v + 1 for v in range(g.n) if mask >> v & 1]
        if all(not g.adjacent(u, v) for u, v in combinations(vs, 2)):
            best = max(best, len(vs))
    return best


def test_independence_number():
    assert independence_number(c3()) == 1
    assert independence_number(build_graph(4, [], "oriented")) == 4
    assert independence_number(build_graph(4, [(1, 2), (3, 4)], "oriented")) == 2
    with pytest.raises(SizeLimitError):
        independence_number(build_graph(70, [], "oriented"))


def test_independence_against_brute(rng):
    for _ in range(40):
        g = random_oriented(int(rng.integers(1, 11)), rng, float(rng.random()))
        assert independence_number(g) == brute_alpha(g)
    for _ in range(10):
        assert independence_number(random_tournament(int(rng.integers(1, 30)), rng)) == 1


def test_chain_order():
    assert chain_order(transitive_tournament(3), [1, 2, 3]) == [1, 2, 3]
    with pytest.raises(NotAChain):
        chain_order(c3(), [1, 2, 3])
    g = build_graph(3, [(1, 2)], "oriented")
    with pytest.raises(NotAChain):
        chain_order(g, [1, 2, 3])
    t = relabel(transitive_tournament(5), [3, 5, 1, 2, 4])
    order = chain_order(t, mask_of(range(1, 6)))
    assert all(t.has_arc(a, b) for a, b in combinations(order, 2))


def test_canonical_form_examples():
    assert canonical_form(c3()) == canonical_form(relabel(c3(), [2, 3, 1])) == canonical_form(relabel(c3(), [2, 1, 3]))
    assert canonical_form(c3()) != canonical_form(transitive_tournament(3))
    forms = {canonical_form(t) for t in all_tournaments(4)}
    assert len(forms) == 4


def test_canonical_form_matches_brute_isomorphism(rng):
    ts = list(all_tournaments(4))
    for _ in range(60):
        a, b = (ts[int(i)] for i in rng.integers(0, len(ts), 2))
        assert (canonical_form(a) == canonical_form(b)) == brute_isomorphic(a, b)
    for _ in range(30):
        a, b = random_oriented(5, rng, 0.6), random_oriented(5, rng, 0.6)
        assert is_isomorphic(a, b) == brute_isomorphic(a, b)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.randoms(use_true_random=False))
def test_canonical_form_relabel_invariant(n, seed, rnd):
    import numpy as np

    g = random_oriented(n, np.random.default_rng(seed), 0.7)
    pi = list(range(1, n + 1))
    rnd.shuffle(pi)
    assert canonical_form(g) == canonical_form(relabel(g, pi))


def test_canonical_form_exhaustive_relabel_n5(rng):
    g = random_tournament(5, rng)
    form = canonical_form(g)
    assert all(canonical_form(relabel(g, p)) == form for p in permutations(range(1, 6)))


def test_automorphism_count():
    assert automorphism_count(c3()) == 3
    assert automorphism_count(transitive_tournament(6)) == 1
    assert automorphism_count(transitive_tournament(1)) == 1


def test_automorphism_against_brute(rng):
    for _ in range(15):
        g = random_tournament(int(rng.integers(1, 7)), rng)
        brute = sum(
            all(g.has_arc(p[u - 1], p[v - 1]) == g.has_arc(u, v) for u in g.vertices for v in g.vertices if u != v)
            for p in permutations(g.vertices)
        )
        assert automorphism_count(g) == brute


def test_induced_copy(rng):
    g = random_tournament(9, rng)
    vs = [2, 7, 4, 9]
    h = induced(g, vs)
    img = find_induced_copy(g, h)
    assert img is not None
    assert induced(g, img) == h
    assert find_induced_copy(transitive_tournament(6), c3()) is None


def test_transitive():
    assert is_transitive(transitive_tournament(7))
    assert not is_transitive(c3())
