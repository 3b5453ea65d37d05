"""Acceptance suite. Each test carries a ``criterion`` marker; the terminal
summary prints one PASS/FAIL line per criterion."""

import gc
import time
from itertools import combinations
from math import factorial

import numpy as np
import pytest

from conftest import all_tournaments, c3, layered_oriented
from test_fo_logic import brute_ds, brute_fvs
from tournament_tww.bst import (
    TERNARY,
    branch,
    branch_chain_split,
    bst_build,
    bst_validate,
    check_branch,
    left_to_right,
    order_rank,
)
from tournament_tww.chain_order import (
    IntervalFamily,
    budget,
    chain_quasi_order,
    extract_nonoverlapping,
    oriented_budget,
    overlapping_bruteforce,
    verify_extraction,
)
from tournament_tww.fo_logic import ds_formula, fvs_formula, model_check
from tournament_tww.graph import (
    canonical_form,
    chain_order,
    independence_number,
    is_transitive,
    random_oriented,
    random_tournament,
    relabel,
    transitive_tournament,
)
from tournament_tww.matrix import MatrixClassKind, apply_log, build_M, normalize_matrix_class
from tournament_tww.obstructions import (
    ObstructionKind,
    anchor_candidates,
    build_F,
    contains_member,
    decode_F,
    decode_roles,
    enumerate_family,
    extend_sigma,
    generators,
    non_containment_witness,
)
from tournament_tww.permutation import Permutation, all_permutations, grid_permutation, max_grid
from tournament_tww.structure import from_graph
from tournament_tww.twin_width import (
    approximate_tournament_tww,
    exact_twin_width,
    greedy_contraction,
    verify_approx,
    width_of_sequence,
)

KINDS = list(ObstructionKind)
STRATEGIES = ("insertion", "random", "median")


def fresh_rng(salt):
    return np.random.default_rng([20240611, salt])


# -- 1. search trees -------------------------------------------------------


def ancestor_rule_holds(g, t):
    """Every descendant of x sits on the side of x its arc to x dictates."""
    stack = [(t.root, [])]  # (node, [(ancestor, side)])
    while stack:
        v, anc = stack.pop()
        for x, side in anc:
            if side == "L" and not g.has_arc(v, x):
                return False
            if side == "R" and not g.has_arc(x, v):
                return False
            if side == "C" and (g.has_arc(v, x) or g.has_arc(x, v)):
                return False
        for child, side in ((t.left[v], "L"), (t.center[v], "C"), (t.right[v], "R")):
            if child:
                stack.append((child, anc + [(v, side)]))
    return True


@pytest.mark.criterion(1)
def test_bst_validity_and_ancestor_rule():
    rng = fresh_rng(1)
    start = time.perf_counter()
    for i in range(500):
        n = int(rng.integers(1, 201))
        g = random_tournament(n, rng)
        for strategy in STRATEGIES:
            seq = [int(v) + 1 for v in rng.permutation(n)] if strategy == "insertion" else None
            t = bst_build(g, strategy, seq=seq, seed=i)
            assert bst_validate(g, t) is None
            assert ancestor_rule_holds(g, t)
            rank = order_rank(left_to_right(t))
            for leaf in t.leaves():
                assert check_branch(g, t, leaf, rank)
                # the whole branch is a chain of a tournament; its enumeration is <_S
                path = branch(t, leaf)
                assert chain_order(g, path) == sorted(path, key=rank.__getitem__)
    assert time.perf_counter() - start < 60


# -- 2. extraction contract ------------------------------------------------


def trace_rules_hold(trace, d=2):
    """Weight recurrence between consecutive nodes and the minus-three index rule."""
    w, idx = trace.weights, trace.indices
    for i in range(len(w) - 1):
        if not (w[i + 1] <= w[i] and d * w[i + 1] + 1 >= w[i]):
            return False
    if idx and idx[0] != 0:
        return False
    for a, b in zip(idx, idx[1:]):
        want = next((j for j in range(a + 1, len(w)) if w[j] <= w[a] - 3), None)
        if b != want or d * w[b] + 3 < w[a]:
            return False
    return True


def pairwise_nonoverlapping(g, e):
    q = chain_quasi_order(g, e.chain, e.orientation)
    parts = e.parts.parts
    return all(not overlapping_bruteforce(q, parts[a], parts[b]) for a, b in combinations(range(len(parts)), 2))


@pytest.mark.criterion(2)
def test_extraction_contract():
    rng = fresh_rng(2)
    need = budget(2)
    assert need == 61
    for i in range(200):
        n = int(rng.integers(200, 5001))
        g = random_tournament(n, rng)
        t = bst_build(g, "random", seed=i)
        order = left_to_right(t)
        size = int(rng.integers(need, n + 1))
        chosen = set(int(v) + 1 for v in rng.choice(n, size=size, replace=False))
        fam = IntervalFamily.singletons(v for v in order if v in chosen)
        e = extract_nonoverlapping(g, t, fam, 2, enforce_budget=True)
        assert len(e.parts) >= 2
        assert verify_extraction(g, e) == []
        assert pairwise_nonoverlapping(g, e)
        assert e.trace.check() == []
        assert trace_rules_hold(e.trace)


def mean_extraction_time(n, runs=5):
    g = random_tournament(n, fresh_rng(1000 + n))
    times = []
    for r in range(runs):
        t = bst_build(g, "random", seed=r)
        fam = IntervalFamily.singletons(left_to_right(t))
        gc.collect()
        gc.disable()
        try:
            start = time.perf_counter()
            e = extract_nonoverlapping(g, t, fam, 2)
            times.append(time.perf_counter() - start)
        finally:
            gc.enable()
        assert len(e.parts) >= 2
    return sum(times) / len(times)


@pytest.mark.criterion(2)
def test_extraction_is_linear():
    sizes = (1 << 12, 1 << 13, 1 << 14)
    means = [mean_extraction_time(n) for n in sizes]
    ratios = [b / a for a, b in zip(means, means[1:])]
    print("extraction means", [f"{m:.4f}" for m in means], "ratios", [f"{r:.2f}" for r in ratios])
    assert all(r <= 2.5 for r in ratios), ratios


# -- 3. exact twin-width on small tournaments -----------------------------


@pytest.mark.criterion(3)
def test_exact_twin_width_small_classes():
    start = time.perf_counter()
    counts = []
    for n in range(1, 6):
        classes = {}
        for g in all_tournaments(n):
            classes.setdefault(canonical_form(g), g)
        counts.append(len(classes))
        for g in classes.values():
            s = from_graph(g)
            w, seq = exact_twin_width(s)
            assert width_of_sequence(s, seq, mode="recompute").width == w
            assert width_of_sequence(s, seq).width == w
            rep, _ = greedy_contraction(s, "best-pair")
            assert rep.width >= w
            if is_transitive(g):
                assert w == 0
    assert counts == [1, 1, 2, 4, 12]
    assert exact_twin_width(from_graph(c3()))[0] == 1
    assert time.perf_counter() - start < 60


# -- 4. decoding round trip -----------------------------------------------


@pytest.mark.criterion(4)
def test_decode_roundtrip():
    rng = fresh_rng(4)
    for n in range(2, 6):
        for sigma in all_permutations(n):
            for r in KINDS:
                ext = extend_sigma(r, sigma)
                t, roles = build_F(r, ext)
                assert decode_F(r, t) == sigma
                cands = anchor_candidates(r, t)
                if r is ObstructionKind.GE:
                    # x_1 is the anchor; y_1 ties only when ext(2) = 1, and loses on the arc x_1 -> y_1
                    assert roles.x[0] in cands and len(cands) <= 2
                else:
                    assert cands == [roles.y[n]]
                for _ in range(10):
                    pi = [int(v) + 1 for v in rng.permutation(t.n)]
                    u = relabel(t, pi)
                    got_ext, got = decode_roles(r, u)
                    assert got_ext == ext and decode_F(r, u) == sigma
                    assert got.x == tuple(pi[v - 1] for v in roles.x)


# -- 5. counting generators -----------------------------------------------


@pytest.mark.criterion(5)
def test_generator_counts_and_minimality():
    for r in KINDS:
        rows = enumerate_family(r, 4)
        assert [c.m for c in rows] == [2, 3, 4]
        for c in rows:
            assert c.members == c.count_distinct == factorial(c.m)
            assert c.all_rigid
            assert c.labelled == factorial(2 * c.m + 2) * factorial(c.m)
        assert all(t.n == 2 * 4 + 2 for _, t in generators(r, 4))
    for host in KINDS:
        for pattern in KINDS:
            if host is pattern:
                continue
            sigma = non_containment_witness(host, pattern, max_m=3, max_host_m=5)
            assert sigma is not None, (host, pattern)
            t, _ = build_F(pattern, extend_sigma(pattern, sigma))
            assert not contains_member(host, t, 5)


# -- 6. matrix classes ----------------------------------------------------

PREDICATES = {
    "=": lambda s, i, j: j == s(i),
    "!=": lambda s, i, j: j != s(i),
    "<=R": lambda s, i, j: j <= s(i),
    ">=R": lambda s, i, j: j >= s(i),
    "<=C": lambda s, i, j: i <= s.inverse()(j),
    ">=C": lambda s, i, j: i >= s.inverse()(j),
}


@pytest.mark.criterion(6)
def test_matrix_classes_and_normalization():
    assert {k.value for k in MatrixClassKind} == set(PREDICATES)
    for sigma in all_permutations(4):
        for tag, pred in PREDICATES.items():
            m = build_M(tag, sigma)
            assert m.rows == m.cols == 4
            for i in range(1, 5):
                for j in range(1, 5):
                    assert m[i - 1, j - 1] == int(pred(sigma, i, j))
    samples = list(all_permutations(4)) + list(all_permutations(5)) + [grid_permutation(3)]
    for sigma in samples:
        before = max_grid(sigma)
        for tag in PREDICATES:
            for rr in (False, True):
                for rc in (False, True):
                    norm = normalize_matrix_class(tag, sigma, reverse_rows=rr, reverse_cols=rc)
                    assert norm.kind.value in ("=", "<=R", ">=R")
                    assert apply_log(build_M(tag, sigma), norm.log) == build_M(norm.kind, norm.sigma)
                    assert max_grid(norm.sigma) >= before - 1


# -- 7. grid permutations -------------------------------------------------


def explicit_grid(sigma, k):
    """Cut rows and columns into k blocks of k and check every cell holds a 1."""
    hit = {(i // k, (sigma(i + 1) - 1) // k) for i in range(k * k)}
    return hit == {(a, b) for a in range(k) for b in range(k)}


@pytest.mark.criterion(7)
def test_grid_permutation():
    for k in (2, 3, 4):
        sigma = grid_permutation(k)
        assert explicit_grid(sigma, k)
        assert max_grid(sigma) >= k
    for n in range(1, 13):
        assert max_grid(Permutation.identity(n)) == 1
        assert max_grid(Permutation.reverse(n)) == 1


# -- 8. logic oracles -----------------------------------------------------


@pytest.mark.criterion(8)
def test_fo_formulas_match_search():
    rng = fresh_rng(8)
    start = time.perf_counter()
    for _ in range(200):
        g = random_tournament(int(rng.integers(1, 11)), rng)
        ds, fvs = brute_ds(g), brute_fvs(g)
        for k in (0, 1, 2, 3):
            assert model_check(g, ds_formula(k)) == (ds <= k)
            assert model_check(g, fvs_formula(k)) == (fvs <= k)
    assert time.perf_counter() - start < 120


# -- 9. approximation witnesses -------------------------------------------


@pytest.mark.criterion(9)
def test_approximation_witnesses():
    rng = fresh_rng(9)
    for i in range(100):
        n = int(rng.integers(1, 41))
        k = int(rng.integers(1, 4))
        if i % 5 == 0:
            g = relabel(transitive_tournament(n), [int(v) + 1 for v in rng.permutation(n)])
            k = max(k, 2)  # every matrix has a rank-1 division
        else:
            g = random_tournament(n, rng)
        strategy = STRATEGIES[i % 3]
        r = approximate_tournament_tww(g, k, strategy=strategy, seed=i)
        assert verify_approx(g, r)
        if i % 5 == 0:
            # a staircase matrix has no 2-diverse cell pattern, so the contraction branch runs
            assert r.kind == "contraction"
        if is_transitive(g) and r.kind == "contraction":
            assert r.report.width == 0
    for r_kind in KINDS:
        for m in range(2, 5):
            for _, t in generators(r_kind, m):
                for k in (1, 2):
                    assert verify_approx(t, approximate_tournament_tww(t, k))


# -- 10. oriented graphs --------------------------------------------------


def independent_four_set(g):
    """Brute force: is there an independent set of size 4?"""
    non = [0] + [g.non_neighbours(v) for v in g.vertices]
    for u in g.vertices:
        for v in (w for w in g.vertices if w > u and (non[u] >> w) & 1):
            common = non[u] & non[v] & ~((1 << (v + 1)) - 1)
            w_mask = common
            while w_mask:
                low = w_mask & -w_mask
                w = low.bit_length() - 1
                if common & non[w] & ~((1 << (w + 1)) - 1):
                    return True
                w_mask ^= low
    return False


def brute_alpha(g):
    """Largest independent set of size at most 3, by direct enumeration."""
    if g.n == 0:
        return 0
    adj = lambda a, b: g.has_arc(a, b) or g.has_arc(b, a)
    best = 1
    for a, b in combinations(g.vertices, 2):
        if not adj(a, b):
            best = 2
            if any(not adj(a, c) and not adj(b, c) for c in g.vertices if c > b):
                return 3
    return best


def oriented_corpus(rng):
    graphs = []
    while len(graphs) < 50:
        layers = int(rng.integers(1, 4))
        sizes = [int(s) for s in rng.integers(1, 21, size=layers)]
        graphs.append(layered_oriented(sizes, rng, cross=float(rng.uniform(0.3, 0.9))))
    while len(graphs) < 100:
        g = random_oriented(int(rng.integers(1, 61)), rng, float(rng.uniform(0.85, 1.0)))
        if not independent_four_set(g):
            graphs.append(g)
    return graphs


def spec_k(n, alpha):
    """Largest k with budget(k + alpha) <= n, or 0."""
    k = 0
    while budget(k + 1 + alpha) <= n:
        k += 1
    return k


def ternary_k(n, alpha):
    k = 0
    while oriented_budget(k + 1, alpha) <= n:
        k += 1
    return k


@pytest.mark.criterion(10)
def test_oriented_generalization():
    rng = fresh_rng(10)
    seen = set()
    for i, g in enumerate(oriented_corpus(rng)):
        assert not independent_four_set(g)
        alpha = brute_alpha(g)
        assert alpha == independence_number(g) and alpha <= 3
        seen.add(alpha)
        t = bst_build(g, "random", seed=i, arity=TERNARY)
        assert t.arity == TERNARY
        assert bst_validate(g, t) is None
        for leaf in t.leaves():
            rest, xs = branch_chain_split(g, t, leaf)
            assert len(xs) <= alpha
            assert check_branch(g, t, leaf)
        k = max(spec_k(g.n, alpha), ternary_k(g.n, alpha))
        fam = IntervalFamily.singletons(left_to_right(t))
        e = extract_nonoverlapping(g, t, fam, k, alpha=alpha)
        assert len(e.parts) >= k
        assert verify_extraction(g, e) == []
        assert pairwise_nonoverlapping(g, e)
    assert seen == {1, 2, 3}


# -- companions at sizes where the oriented budgets bite ------------------


@pytest.mark.parametrize("layers, k", [(2, 2), (3, 1)])
def test_oriented_extraction_large(layers, k):
    rng = fresh_rng(100 + layers)
    n = 2000
    sizes = [n // layers] * (layers - 1) + [n - (n // layers) * (layers - 1)]
    g = layered_oriented(sizes, rng, cross=0.5)
    # each layer is a tournament, so an independent set meets it at most once
    alpha = layers
    assert budget(k + alpha) <= n and oriented_budget(k, alpha) <= n
    for seed in range(3):
        t = bst_build(g, "random", seed=seed, arity=TERNARY)
        assert bst_validate(g, t) is None
        fam = IntervalFamily.singletons(left_to_right(t))
        e = extract_nonoverlapping(g, t, fam, k, enforce_budget=True, alpha=alpha)
        assert len(e.parts) >= k
        assert verify_extraction(g, e) == []
        assert len(e.trace.removed) <= alpha - 1


def test_binary_oriented_budget_suffices_in_samples():
    # budget(k + alpha) = 1021 parts for k = 2, alpha = 2: below the ternary guarantee
    rng = fresh_rng(200)
    n = budget(4)
    assert n < oriented_budget(2, 2)
    for seed in range(5):
        g = layered_oriented([n // 2, n - n // 2], rng, cross=0.5)
        t = bst_build(g, "random", seed=seed, arity=TERNARY)
        e = extract_nonoverlapping(g, t, IntervalFamily.singletons(left_to_right(t)), 2, alpha=2)
        assert len(e.parts) >= 2
        assert verify_extraction(g, e) == []
