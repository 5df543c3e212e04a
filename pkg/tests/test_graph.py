import io
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from logitsbm.exceptions import DataError
from logitsbm.graph import Graph, load_edge_list, load_gml, load_labels, write_edge_list, write_labels


def triangle():
    return load_edge_list(["a b", "b c", "c a"])


def test_triangle():
    g = triangle()
    assert g.n == 3 and g.m == 3
    assert g.degree.tolist() == [2, 2, 2]
    assert g.tokens == ("a", "b", "c")


def test_duplicates_and_loops_dropped_with_warning():
    with pytest.warns(UserWarning, match="1 self-loops and 1 duplicate"):
        g = load_edge_list(["a b", "a b", "a a"])
    assert g.n == 2 and g.m == 1


def test_reversed_duplicate_counts_as_duplicate():
    with pytest.warns(UserWarning):
        g = load_edge_list(["a b", "b a"])
    assert g.m == 1


def test_comments_and_whitespace():
    g = load_edge_list(io.StringIO("# header\n\nx\t y\n  y   z  \n"))
    assert g.n == 3 and g.m == 2


def test_bad_line():
    with pytest.raises(DataError, match="line 2"):
        load_edge_list(["a b", "a b c"])


def test_empty_after_cleaning():
    with pytest.raises(DataError, match="empty"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            load_edge_list(["a a", "# nothing"])


def test_stdin(monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("1 2\n2 3\n"))
    assert load_edge_list("-").m == 2


def test_path_roundtrip(tmp_path, spike):
    g, _ = spike
    path = tmp_path / "edges.txt"
    write_edge_list(g, path)
    h = load_edge_list(path)
    assert h.n == g.n
    assert {(g.tokens[i], g.tokens[j]) for i, j in g.edges} == \
        {(h.tokens[i], h.tokens[j]) for i, j in h.edges}


def test_spike_kernel_degree(spike):
    g, _ = spike
    # complete kernel (n1 - 1) + crown 1 + r between edges
    assert g.degree[0] == 9 + 1 + 5


def test_adjacency_queries():
    g = Graph.from_edges(4, [(0, 1), (2, 1), (3, 0)])
    assert g.has_edge(1, 0) and g.has_edge(0, 3) and not g.has_edge(2, 3)
    assert g.neighbors(1).tolist() == [0, 2]
    A = g.adjacency
    assert (A == A.T).all() and A.sum() == 2 * g.m
    with pytest.raises(ValueError):
        A[0, 0] = 1


def test_out_of_range_edge():
    with pytest.raises(DataError):
        Graph.from_edges(3, [(0, 3)])


def test_subgraph_and_components():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (4, 5)])
    h = g.subgraph(g.degree > 0)
    assert h.n == 5 and h.m == 3 and h.tokens == ("0", "1", "2", "4", "5")
    big, keep = g.largest_component()
    assert big.n == 3 and keep.tolist() == [True, True, True, False, False, False]


@given(st.lists(st.tuples(st.integers(0, 14), st.integers(0, 14)), min_size=1, max_size=60))
def test_degree_invariants(pairs):
    g = Graph.from_edges(15, pairs)
    assert g.degree.sum() == 2 * g.m
    assert np.all(g.edges[:, 0] < g.edges[:, 1])
    A = g.adjacency.astype(int)
    assert (A == A.T).all() and np.trace(A) == 0
    assert (A.sum(axis=1) == g.degree).all()
    assert len({tuple(e) for e in g.edges.tolist()}) == g.m


# -- labels ------------------------------------------------------------------

def test_labels_basic():
    assert load_labels(["a 1", "b 1", "c 2"], triangle()).tolist() == [1, 1, 2]


def test_labels_recoded_by_first_appearance():
    assert load_labels(["a 5", "b 5", "c 9"], triangle()).tolist() == [1, 1, 2]
    assert load_labels(["c 9", "a 5", "b 5"], triangle()).tolist() == [2, 2, 1]


def test_labels_missing_nodes():
    with pytest.raises(DataError, match="missing nodes"):
        load_labels(["a 1", "b 2"], triangle())


def test_labels_unknown_token():
    with pytest.raises(DataError, match="not in graph"):
        load_labels(["a 1", "b 2", "c 2", "zz 1"], triangle())


def test_labels_single_community():
    with pytest.raises(DataError, match="fewer than 2"):
        load_labels(["a 1", "b 1", "c 1"], triangle())


@pytest.mark.parametrize("line", ["a x", "a 0", "a 1 2"])
def test_labels_bad_values(line):
    with pytest.raises(DataError):
        load_labels([line, "b 1", "c 2"], triangle())


def test_labels_roundtrip(tmp_path):
    g = triangle()
    write_labels([2, 1, 2], g, tmp_path / "lab.txt")
    assert load_labels(tmp_path / "lab.txt", g).tolist() == [1, 2, 1]


GML = """
Creator "test"
graph [
  directed 1
  node [ id 10 label "a.com" value 0 ]
  node [ id 11 label "b.com" value 0 ]
  node [ id 12 label "c.com" value 1 ]
  node [ id 13 label "d.com" value 1 ]
  node [ id 14 label "lonely" value 1 ]
  edge [ source 10 target 11 ]
  edge [ source 11 target 10 ]
  edge [ source 12 target 13 ]
  edge [ source 11 target 12 ]
]
"""


def test_gml():
    g, labels = load_gml(io.StringIO(GML))
    assert g.n == 4 and g.m == 3
    assert g.tokens == ("10", "11", "12", "13")
    assert labels.tolist() == [1, 1, 2, 2]
    g2, labels2 = load_gml(io.StringIO(GML), drop_isolated=False)
    assert g2.n == 5 and labels2.tolist() == [1, 1, 2, 2, 2]
