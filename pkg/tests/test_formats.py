import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import c3
from tournament_tww.bst import TERNARY, bst_build
from tournament_tww.chain_order import IntervalFamily
from tournament_tww.errors import DigonError, MissingArcError, ParseError
from tournament_tww.formats import (
    read_bst,
    read_digraph,
    read_family,
    read_matrix,
    read_permutation,
    read_sequence,
    write_bst,
    write_digraph,
    write_family,
    write_matrix,
    write_permutation,
    write_sequence,
)
from tournament_tww.graph import random_oriented, random_tournament
from tournament_tww.matrix import Matrix
from tournament_tww.permutation import Permutation
from tournament_tww.twin_width import ContractionSequence


def test_digraph_example():
    text = "# a triangle\np dtw 3 3\na 1 2\n\na 2 3\na 3 1\n"
    assert read_digraph(text) == c3()
    assert write_digraph(c3()) == "p dtw 3 3\na 1 2\na 2 3\na 3 1\n"


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("p dtw 3\n", 1),
        ("p tw 2 1\na 1 2\n", 1),
        ("p dtw 2 1\nb 1 2\n", 2),
        ("p dtw 2 1\na 1 x\n", 2),
        ("p dtw 2 1\na 1 3\n", 2),
        ("p dtw 2 2\na 1 2\n", 2),
    ],
)
def test_digraph_parse_errors(text, line):
    with pytest.raises(ParseError) as exc:
        read_digraph(text)
    assert exc.value.line == line


def test_digraph_graph_errors():
    with pytest.raises(MissingArcError):
        read_digraph("p dtw 3 2\na 1 2\na 2 3\n")
    with pytest.raises(DigonError):
        read_digraph("p dtw 2 2\na 1 2\na 2 1\n", kind="oriented")
    assert read_digraph("p dtw 3 1\na 1 2\n", kind="oriented").n == 3


def test_digraph_roundtrip(rng):
    for _ in range(20):
        g = random_tournament(int(rng.integers(1, 30)), rng)
        assert read_digraph(write_digraph(g)) == g
        h = random_oriented(int(rng.integers(1, 30)), rng, 0.4)
        assert read_digraph(write_digraph(h), kind="oriented") == h


@settings(max_examples=50, deadline=None)
@given(st.permutations(list(range(1, 10))))
def test_permutation_roundtrip(vals):
    p = Permutation(tuple(vals))
    assert read_permutation(write_permutation(p)) == p


def test_permutation_errors():
    assert read_permutation("s 5\n3 1\n4 5 2\n") == Permutation.of("31452")
    with pytest.raises(ParseError):
        read_permutation("s 3\n1 2\n")
    with pytest.raises(ParseError) as exc:
        read_permutation("s 3\n1 1 2\n")
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        read_permutation("s 2\n1 2\n3\n")


def test_matrix_roundtrip_and_errors():
    m = Matrix.of([[0, 1, 1], [1, 0, 0]])
    assert write_matrix(m) == "m 2 3\n011\n100\n"
    assert read_matrix(write_matrix(m)) == m
    with pytest.raises(ParseError):
        read_matrix("m 2 3\n011\n10\n")
    with pytest.raises(ParseError):
        read_matrix("m 2 3\n011\n")


def test_bst_roundtrip(rng):
    g = random_tournament(25, rng)
    t = bst_build(g, "random", seed=4)
    assert read_bst(write_bst(t)) == t
    h = random_oriented(20, rng, 0.5)
    t = bst_build(h, "median")
    assert t.arity == TERNARY
    assert read_bst(write_bst(t)) == t


def test_bst_errors():
    with pytest.raises(ParseError):
        read_bst("t 2 quaternary\nr 1\nv 1 0 2\nv 2 0 0\n")
    with pytest.raises(ParseError):
        read_bst("t 2 binary\nr 1\nv 1 0 2\nv 1 0 0\n")
    with pytest.raises(ParseError):
        read_bst("t 2 binary\nr 1\nv 1 0 2\n")
    with pytest.raises(ParseError):
        read_bst("t 2 binary\nr 1\nv 1 0 2\nv 2 1 0\n")


def test_family_and_sequence():
    f = IntervalFamily.of([[1, 2], [5]])
    assert read_family(write_family(f)) == f
    assert write_family([[3], [4, 6]]) == "f 2\n3\n4 6\n"
    with pytest.raises(ParseError):
        read_family("f 3\n1\n2\n")
    seq = ContractionSequence(4, ((1, 2), (3, 4), (1, 3)))
    assert write_sequence(seq) == "cs 4\n1 2\n3 4\n1 3\n"
    assert read_sequence(write_sequence(seq)) == seq
    assert read_sequence("cs 1\n") == ContractionSequence(1, ())
    with pytest.raises(ParseError):
        read_sequence("cs 3\n1 2\n")
    with pytest.raises(ParseError):
        read_sequence("cs 3\n1 2\n2 4\n")
