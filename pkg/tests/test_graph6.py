import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qudit_cd.graph import (
    Graph,
    GraphFormatError,
    decode_graph6,
    encode_graph6,
    format_edgelist,
    parse_edgelist,
    parse_graph,
    read_graph6_corpus,
)


@st.composite
def graphs(draw, max_n=20):
    n = draw(st.integers(0, max_n))
    pairs = [(i, j) for j in range(n) for i in range(j)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [p for p, m in zip(pairs, mask) if m])


@settings(max_examples=200, deadline=None)
@given(graphs())
def test_round_trip(g):
    data = encode_graph6(g)
    assert decode_graph6(data) == g
    assert encode_graph6(decode_graph6(data)) == data


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=30))
def test_matches_networkx(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges)
    ref = nx.to_graph6_bytes(G, header=False).strip()
    assert encode_graph6(g) == ref


def test_long_form_size():
    g = Graph.path(70)
    data = encode_graph6(g)
    assert data[0] == 126
    assert decode_graph6(data) == g


def test_examples():
    assert encode_graph6(decode_graph6("D?{")) == b"D?{"
    assert decode_graph6("C~").n == 4
    assert decode_graph6(">>graph6<<C~\n") == Graph.complete(4)
    assert parse_edgelist("1 2\n2 3\n3 4\n") == Graph.path(4)


def test_trailing_whitespace_tolerated():
    assert decode_graph6("D?{ \n") == decode_graph6("D?{")


# empty, truncated, overlong, nonzero padding, bad byte, unsupported size form
@pytest.mark.parametrize("bad", ["", "C", "C~~", "B@", "\x7fabc", "~~abc"])
def test_graph6_errors(bad):
    with pytest.raises(GraphFormatError):
        decode_graph6(bad)


@pytest.mark.parametrize(
    "text",
    ["1 1\n", "1 2\n2 1\n", "0 1\n", "1 2 3\n", "a b\n", "n 2\n1 3\n"],
)
def test_edgelist_errors(text):
    with pytest.raises(GraphFormatError):
        parse_edgelist(text)


def test_edgelist_comments_and_isolated():
    g = parse_edgelist("# header\nn 5\n1 2  # first\n\n4 2\n")
    assert g.n == 5 and g.edges == {(0, 1), (1, 3)}
    assert parse_edgelist(format_edgelist(g)) == g


def test_parse_graph_dispatch():
    assert parse_graph(b"C~", "graph6") == Graph.complete(4)
    with pytest.raises(ValueError):
        parse_graph(b"C~", "dot")


def test_corpus_reader(tmp_path):
    p = tmp_path / "g.g6"
    p.write_text("C~\n\nD?{\n")
    gs = read_graph6_corpus(p.read_bytes())
    assert [g.n for g in gs] == [4, 5]


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 3)])
    assert Graph.cycle(5).degrees() == [2] * 5
    assert not Graph(4, [(0, 1)]).is_connected()
