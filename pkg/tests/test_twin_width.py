from itertools import combinations, permutations

import numpy as np
import pytest

from conftest import all_tournaments, c3, iso_classes
from tournament_tww import _accel
from tournament_tww.errors import InvalidMerge, Overlap, SizeLimitError
from tournament_tww.graph import induced, random_oriented, random_tournament, relabel, transitive_tournament
from tournament_tww.obstructions import build_F, extend_sigma
from tournament_tww.permutation import Permutation, grid_permutation
from tournament_tww.structure import BinaryStructure, from_graph, relation_masks
from tournament_tww.twin_width import (
    ContractionSequence,
    ContractionState,
    approximate_tournament_tww,
    exact_twin_width,
    exact_twin_width_dp,
    greedy_contraction,
    is_homogeneous,
    WidthReport,
    verify_approx,
    width_of_sequence,
)
from tournament_tww.matrix import Division


def test_is_homogeneous_examples():
    s = from_graph(transitive_tournament(3))
    assert is_homogeneous(s, [1], [2])
    assert is_homogeneous(s, [1, 2], [3])
    assert not is_homogeneous(from_graph(c3()), [1, 2], [3])
    with pytest.raises(Overlap):
        is_homogeneous(s, [1, 2], [2])
    with pytest.raises(ValueError):
        is_homogeneous(s, [], [2])


def all_sequences(n):
    """Every merge sequence on 1..n, merges named canonically."""
    def rec(parts, acc):
        if len(parts) == 1:
            yield ContractionSequence(n, tuple(acc))
            return
        for i, j in combinations(range(len(parts)), 2):
            a, b = parts[i], parts[j]
            rest = [p for p in parts if p not in (a, b)] + [min(a, b)]
            yield from rec(sorted(rest), acc + [(a, b)])
    yield from rec(list(range(1, n + 1)), [])


def test_width_examples():
    for n in (1, 2, 5, 9):
        s = from_graph(transitive_tournament(n))
        seq = ContractionSequence(n, tuple((1, v) for v in range(2, n + 1)))
        assert width_of_sequence(s, seq).width == 0
    s = from_graph(c3())
    seqs = list(all_sequences(3))
    assert len(seqs) == 3
    assert {width_of_sequence(s, q, mode="recompute").width for q in seqs} == {1}
    s = from_graph(c3(), order=[1, 2, 3])
    assert width_of_sequence(s, ContractionSequence(3, ((1, 2), (1, 3)))).width >= 1


def test_width_errors():
    s = from_graph(c3())
    with pytest.raises(InvalidMerge):
        width_of_sequence(s, ContractionSequence(3, ((1, 2), (2, 1))))
    with pytest.raises(InvalidMerge):
        width_of_sequence(s, ContractionSequence(3, ((1, 2),)))
    with pytest.raises(InvalidMerge):
        width_of_sequence(s, ContractionSequence(3, ((1, 4), (1, 2))))
    with pytest.raises(ValueError):
        width_of_sequence(s, ContractionSequence(3, ((1, 2), (1, 3))), mode="fast")


def random_structure(n, rng):
    g = random_oriented(n, rng, float(rng.uniform(0.2, 1.0)))
    order = [int(v) + 1 for v in rng.permutation(n)] if rng.random() < 0.5 else None
    extra = []
    if rng.random() < 0.3:
        extra.append(relation_masks(n, [(u, v) for u in range(1, n + 1) for v in range(1, n + 1)
                                        if u != v and rng.random() < 0.3]))
    return from_graph(g, order, extra)


def random_sequence(n, rng):
    live = list(range(1, n + 1))
    merges = []
    while len(live) > 1:
        i, j = rng.choice(len(live), size=2, replace=False)
        u, v = live[i], live[j]
        merges.append((int(u), int(v)))
        live.remove(max(u, v))
    return ContractionSequence(n, tuple(merges))


def test_incremental_matches_recompute(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        s = random_structure(n, rng)
        seq = random_sequence(n, rng)
        a = width_of_sequence(s, seq, mode="incremental")
        b = width_of_sequence(s, seq, mode="recompute")
        assert a.step_widths == b.step_widths
        assert a.width == b.width == max(a.step_widths, default=0)


def test_sequence_naming_by_any_member():
    seq = ContractionSequence(4, ((3, 4), (4, 1), (2, 3)))
    assert seq.canonical().merges == ((3, 4), (1, 3), (1, 2))
    s = from_graph(c3())
    assert seq.partitions()[-1] == [0b11110]
    assert width_of_sequence(from_graph(transitive_tournament(4)), seq).width == width_of_sequence(
        from_graph(transitive_tournament(4)), seq.canonical(), mode="recompute"
    ).width
    assert s.n == 3


def test_exact_examples():
    for n in range(1, 9):
        w, seq = exact_twin_width(from_graph(transitive_tournament(n)))
        assert w == 0
    w, seq = exact_twin_width(from_graph(c3()))
    assert w == 1 and width_of_sequence(from_graph(c3()), seq).width == 1
    with pytest.raises(SizeLimitError):
        exact_twin_width(from_graph(transitive_tournament(9)))


def test_exact_on_obstruction_member():
    # 21 extends to 213, which gives 6 vertices; 312 extends to 3124 and 8 vertices
    for sigma, n, frozen in (("21", 6, 1), ("312", 8, 2)):
        g, _ = build_F("=", extend_sigma("=", Permutation.of(sigma)))
        assert g.n == n
        s = from_graph(g)
        w, seq = exact_twin_width(s)
        assert w == exact_twin_width_dp(s) == frozen
        assert width_of_sequence(s, seq, mode="recompute").width == w


def test_exact_matches_dp_oracle(rng):
    for _ in range(30):
        s = random_structure(int(rng.integers(1, 7)), rng)
        w, seq = exact_twin_width(s)
        assert w == exact_twin_width_dp(s)
        assert width_of_sequence(s, seq, mode="recompute").width == w


def test_exact_matches_full_enumeration(rng):
    for _ in range(10):
        s = from_graph(random_tournament(5, rng))
        best = min(width_of_sequence(s, q, mode="recompute").width for q in all_sequences(5))
        assert exact_twin_width(s)[0] == best


def test_greedy_examples():
    for n in (1, 4, 12):
        g = transitive_tournament(n)
        rep, seq = greedy_contraction(from_graph(g), "order-adjacent", list(range(1, n + 1)))
        assert rep.width == 0 and len(seq.merges) == max(n - 1, 0)
    rep, _ = greedy_contraction(from_graph(c3()), "best-pair")
    assert rep.width == 1
    with pytest.raises(ValueError):
        greedy_contraction(from_graph(c3()), "order-adjacent")
    with pytest.raises(ValueError):
        greedy_contraction(from_graph(c3()), "cheapest")


def test_greedy_order_from_structure():
    s = from_graph(transitive_tournament(6), order=[3, 1, 2, 6, 5, 4])
    rep, seq = greedy_contraction(s, "order-adjacent")
    assert width_of_sequence(s, seq, mode="recompute").width == rep.width


def test_greedy_not_below_exact(rng):
    for _ in range(40):
        s = random_structure(int(rng.integers(1, 8)), rng)
        w, _ = exact_twin_width(s)
        rep, seq = greedy_contraction(s, "best-pair")
        assert rep.width >= w
        assert width_of_sequence(s, seq, mode="recompute").width == rep.width
        order = [int(v) + 1 for v in rng.permutation(s.n)]
        rep, seq = greedy_contraction(s, "order-adjacent", order)
        assert rep.width >= w
        assert width_of_sequence(s, seq, mode="recompute").width == rep.width


def test_exact_relabel_invariant(rng):
    for n in range(1, 7):
        for _ in range(6):
            g = random_tournament(n, rng)
            pi = [int(v) + 1 for v in rng.permutation(n)]
            assert exact_twin_width(from_graph(g))[0] == exact_twin_width(from_graph(relabel(g, pi)))[0]


def test_exact_monotone_on_induced(rng):
    for n in range(2, 7):
        for _ in range(3):
            g = random_tournament(n, rng)
            whole = exact_twin_width(from_graph(g))[0]
            for r in range(1, n):
                for vs in combinations(g.vertices, r):
                    assert exact_twin_width(from_graph(induced(g, vs)))[0] <= whole


def test_order_cannot_lower_width(rng):
    for n in range(1, 6):
        g = random_tournament(n, rng)
        plain = exact_twin_width(from_graph(g))[0]
        for order in permutations(range(1, n + 1)):
            assert plain <= exact_twin_width(from_graph(g, list(order)))[0]
    for _ in range(10):
        g = random_tournament(6, rng)
        order = [int(v) + 1 for v in rng.permutation(6)]
        assert exact_twin_width(from_graph(g))[0] <= exact_twin_width(from_graph(g, order))[0]


def test_small_tournaments_by_class():
    widths = [[exact_twin_width(from_graph(g))[0] for g in iso_classes(n)] for n in range(1, 5)]
    assert widths[0] == [0] and widths[1] == [0]
    assert sorted(widths[2]) == [0, 1]


@pytest.mark.skipif("compiled" not in _accel.available(), reason="extension not built")
def test_kernel_backends_agree(rng):
    try:
        for _ in range(200):
            n = int(rng.integers(2, 15))
            s = random_structure(n, rng)
            seq = random_sequence(n, rng).canonical()
            results = []
            for name in ("python", "compiled"):
                _accel.set_backend(name)
                st = ContractionState(s)
                trials, steps = [], []
                for a, b in seq.merges:
                    live = [int(v) for v in np.nonzero(st.alive)[0]]
                    trials.append([st.trial(p, q) for p, q in combinations(live, 2)])
                    steps.append(st.merge(a, b))
                results.append((trials, steps, st.red.copy().tolist(), st.deg.copy().tolist()))
            assert results[0] == results[1]
    finally:
        _accel.set_backend("compiled")


def test_backend_switching():
    assert "python" in _accel.available()
    with pytest.raises(ValueError):
        _accel.set_backend("gpu")
    old = _accel.backend_name()
    _accel.set_backend("python")
    assert _accel.backend_name() == "python"
    _accel.set_backend(old)


def test_approx_examples():
    for strategy in ("insertion", "random", "median"):
        g = transitive_tournament(16)
        r = approximate_tournament_tww(g, 2, strategy=strategy, seed=1)
        assert r.kind == "contraction" and r.report.width == 0
        assert verify_approx(g, r)
    r = approximate_tournament_tww(transitive_tournament(1), 2)
    assert r.kind == "contraction" and r.sequence.merges == () and r.report.width == 0
    g, _ = build_F("=", extend_sigma("=", grid_permutation(3)))
    r = approximate_tournament_tww(g, 2)
    assert verify_approx(g, r)
    assert (r.division is None) != (r.sequence is None)


def test_approx_random_witnesses_verify(rng):
    for _ in range(40):
        g = random_tournament(int(rng.integers(1, 40)), rng)
        for k in (1, 2, 3):
            r = approximate_tournament_tww(g, k, seed=int(rng.integers(1 << 20)))
            assert verify_approx(g, r)


def test_verify_approx_rejects_tampering():
    g = transitive_tournament(12)
    r = approximate_tournament_tww(g, 2)
    assert verify_approx(g, r)
    r.report = WidthReport(r.report.step_widths, r.report.width + 1)
    assert not verify_approx(g, r)
    r.division = Division((), ())
    assert not verify_approx(g, r)


def test_structure_roundtrip_helpers():
    s = from_graph(c3(), order=[2, 3, 1])
    assert s.holds("ord", 2, 1) and not s.holds("ord", 1, 2)
    assert s.drop("ord").names == ("arc",)
    assert s.induced([1, 2]).pairs("arc") == [(1, 2)]
    t = s.relabel([2, 3, 1])
    assert t.pairs("arc") == sorted([(2, 3), (3, 1), (1, 2)])
    with pytest.raises(KeyError):
        s.relation("nope")
    with pytest.raises(ValueError):
        BinaryStructure(2, ("a", "a"), ((0, 0, 0), (0, 0, 0)))
