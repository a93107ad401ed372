import io
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastball.errors import DuplicateEdge, InvalidEntry, InvalidIndex, ParseError, TooLarge
from fastball.graph import (
    BipartiteGraph,
    DegreeSequences,
    canonical_key,
    degrees,
    enumerate_space,
    format_edge_list,
    format_incidence_matrix,
    from_edge_list,
    from_incidence_matrix,
    is_realizable,
    read_edge_list,
    read_incidence_matrix,
    realize,
    to_incidence_matrix,
)

from .conftest import SMALL_NI, SMALL_NJ


def matrix_filter_count(top, bottom):
    """Independent oracle: scan every 0/1 matrix and keep those with the margins."""
    n, m = len(top), len(bottom)
    count = 0
    for bits in itertools.product((0, 1), repeat=n * m):
        a = np.array(bits).reshape(n, m)
        if a.sum(axis=1).tolist() == list(top) and a.sum(axis=0).tolist() == list(bottom):
            count += 1
    return count


@st.composite
def graphs(draw, max_n=8, max_m=10):
    n = draw(st.integers(0, max_n))
    m = draw(st.integers(0, max_m))
    rows = [sorted(draw(st.sets(st.integers(0, m - 1), max_size=m))) if m else [] for _ in range(n)]
    return BipartiteGraph(n, m, rows)


def test_from_edge_list_small():
    edges = [(0, 0), (0, 2), (0, 4), (0, 5), (1, 1), (1, 3), (1, 5)]
    g = from_edge_list(edges, 2, 6)
    assert g.adj == [SMALL_NI, SMALL_NJ]


def test_from_edge_list_empty():
    g = from_edge_list([], 3, 3)
    assert g.adj == [[], [], []]
    assert g.edge_count == 0


def test_from_edge_list_rejects_duplicates():
    with pytest.raises(DuplicateEdge):
        from_edge_list([(0, 0), (0, 0)], 1, 1)


@pytest.mark.parametrize("edge", [(2, 0), (0, 6), (-1, 0)])
def test_from_edge_list_rejects_out_of_range(edge):
    with pytest.raises(InvalidIndex):
        from_edge_list([edge], 2, 6)


def test_degrees_small(small_graph):
    d = degrees(small_graph)
    assert d.top == (4, 3)
    assert d.bottom == (1, 1, 1, 1, 1, 2)


def test_degrees_empty_and_complete():
    assert degrees(BipartiteGraph(2, 3, [[], []])) == DegreeSequences((0, 0), (0, 0, 0))
    assert degrees(BipartiteGraph(2, 2, [[0, 1], [0, 1]])) == DegreeSequences((2, 2), (2, 2))


def test_incidence_small(small_graph):
    mat = to_incidence_matrix(small_graph)
    assert mat.tolist() == [[1, 0, 1, 0, 1, 1], [0, 1, 0, 1, 0, 1]]


def test_incidence_identity():
    g = from_incidence_matrix(np.eye(3, dtype=int))
    assert g.adj == [[0], [1], [2]]


def test_incidence_rejects_non_binary():
    with pytest.raises(InvalidEntry):
        from_incidence_matrix([[0, 2], [1, 0]])


@settings(max_examples=200, deadline=None)
@given(graphs())
def test_incidence_round_trip(g):
    assert from_incidence_matrix(to_incidence_matrix(g)) == g


@settings(max_examples=200, deadline=None)
@given(graphs())
def test_degree_sums_agree(g):
    d = degrees(g)
    assert sum(d.top) == sum(d.bottom) == g.edge_count


def test_canonical_key_equal_for_equal_graphs(small_graph):
    other = BipartiteGraph(2, 6, [list(SMALL_NI), list(SMALL_NJ)])
    assert canonical_key(small_graph) == canonical_key(other)
    assert canonical_key(BipartiteGraph(2, 2, [[], []])) == canonical_key(BipartiteGraph(2, 2, [[], []]))


def test_canonical_key_distinguishes_traded_graph(small_graph):
    traded = BipartiteGraph(2, 6, [[0, 1, 3, 5], [2, 4, 5]])
    assert canonical_key(small_graph) != canonical_key(traded)


def test_canonical_key_separates_list_boundaries():
    a = BipartiteGraph(2, 12, [[1], [11]])
    b = BipartiteGraph(2, 12, [[11], [1]])
    c = BipartiteGraph(2, 12, [[1, 11], []])
    assert len({canonical_key(a), canonical_key(b), canonical_key(c)}) == 3


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=4, max_m=4), graphs(max_n=4, max_m=4))
def test_canonical_key_injective(g, h):
    same_shape = (g.n, g.m) == (h.n, h.m)
    assert (canonical_key(g) == canonical_key(h)) == (same_shape and g.adj == h.adj)


def test_enumerate_permutation_matrices():
    space = enumerate_space(DegreeSequences((1, 1), (1, 1)))
    assert {tuple(map(tuple, g.adj)) for g in space} == {((0,), (1,)), ((1,), (0,))}


def test_enumerate_forced():
    space = enumerate_space(DegreeSequences((2,), (1, 1)))
    assert [g.adj for g in space] == [[[0, 1]]]


def test_enumerate_3x3_matches_matrix_filter():
    seq = DegreeSequences((2, 2, 2), (2, 2, 2))
    space = enumerate_space(seq)
    assert len(space) == matrix_filter_count(seq.top, seq.bottom) == 6


@pytest.mark.parametrize(
    "text",
    ["1,1/1,1", "2,1,1/2,1,1", "2,2,1,1/2,2,1,1", "2,1/1,1,1", "1,1,1,1/2,2", "3,1/1,1,1,1", "2,2/1,1,1,1"],
)
def test_enumerate_matches_matrix_filter(text):
    seq = DegreeSequences.parse(text)
    space = enumerate_space(seq)
    assert len({canonical_key(g) for g in space}) == len(space)
    assert all(degrees(g) == seq for g in space)
    assert len(space) == matrix_filter_count(seq.top, seq.bottom)


def test_enumerate_infeasible_is_empty():
    # Sums agree but no 0/1 matrix fits: a row of 3 needs three nonzero columns.
    seq = DegreeSequences((3, 1), (2, 2, 0))
    assert not is_realizable(seq.top, seq.bottom)
    assert enumerate_space(seq) == set()


def test_enumerate_guard():
    with pytest.raises(TooLarge):
        enumerate_space(DegreeSequences((1,) * 6, (1,) * 6))


def test_realize_lands_in_space():
    for text in ("2,2,2/2,2,2", "3,2,2,1/2,2,2,2", "2,1,1,1/1,1,1,1,1"):
        seq = DegreeSequences.parse(text)
        assert realize(seq) in enumerate_space(seq)


def test_read_edge_list_labels_and_comments():
    text = "# comment\nA a\nA c\n\nB b\n  # indented comment\nB c\n"
    lg = read_edge_list(io.StringIO(text))
    assert lg.top_labels == ["A", "B"]
    assert lg.bottom_labels == ["a", "c", "b"]
    assert lg.graph.adj == [[0, 1], [1, 2]]
    assert read_edge_list(io.StringIO(format_edge_list(lg))).graph == lg.graph


def test_read_edge_list_reports_line():
    with pytest.raises(ParseError) as info:
        read_edge_list(io.StringIO("A a\nA b\na\n"))
    assert info.value.line == 3


def test_read_edge_list_duplicate_is_parse_error():
    with pytest.raises(ParseError) as info:
        read_edge_list(io.StringIO("A a\nA a\n"))
    assert info.value.line == 2


def test_incidence_file_round_trip(small_graph):
    text = format_incidence_matrix(small_graph)
    assert text.splitlines()[0] == "2 6"
    assert read_incidence_matrix(io.StringIO(text)).graph == small_graph


@pytest.mark.parametrize("text", ["2 2\n0 1\n", "2 2\n0 1\n1 2\n", "x y\n", "1 2\n0 1 1\n"])
def test_incidence_file_errors(text):
    with pytest.raises(ParseError):
        read_incidence_matrix(io.StringIO(text))
