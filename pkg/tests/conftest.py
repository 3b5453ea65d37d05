from itertools import combinations, permutations

import numpy as np
import pytest

from tournament_tww.graph import build_graph, from_array, transitive_tournament


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def c3():
    return build_graph(3, [(1, 2), (2, 3), (3, 1)], "tournament")


def all_tournaments(n):
    pairs = list(combinations(range(1, n + 1), 2))
    for bits in range(1 << len(pairs)):
        arcs = [(u, v) if (bits >> i) & 1 else (v, u) for i, (u, v) in enumerate(pairs)]
        yield build_graph(n, arcs, "tournament")


def brute_isomorphic(g, h):
    if g.n != h.n:
        return False
    for p in permutations(range(1, g.n + 1)):
        if all(h.has_arc(p[u - 1], p[v - 1]) == g.has_arc(u, v) for u in g.vertices for v in g.vertices if u != v):
            return True
    return False


def iso_classes(n):
    reps = []
    for t in all_tournaments(n):
        if not any(brute_isomorphic(t, r) for r in reps):
            reps.append(t)
    return reps


def layered_oriented(sizes, rng, cross=0.6):
    """Disjoint random tournaments joined by random cross arcs; alpha <= len(sizes)."""
    block = np.repeat(np.arange(len(sizes)), sizes)
    n = len(block)
    same = block[:, None] == block[None, :]
    present = np.triu(same | (rng.random((n, n)) < cross), 1)
    forward = rng.random((n, n)) < 0.5
    adj = (present & forward) | (present & ~forward).T
    return from_array(adj, "oriented")


_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _criteria.setdefault(mark.args[0], []).append((item.name, rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        runs = _criteria[n]
        ok = all(passed for _, passed, _ in runs)
        secs = sum(d for _, _, d in runs)
        names = ", ".join(name for name, _, _ in runs)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({secs:.1f}s; {names})")


__all__ = ["all_tournaments", "brute_isomorphic", "c3", "iso_classes", "layered_oriented", "transitive_tournament"]
