import networkx as nx
import numpy as np
import pytest
from hypothesis import strategies as st

from nbcolor import corpus
from nbcolor.graph import Graph


def from_nx(H):
    H = nx.convert_node_labels_to_integers(H)
    return Graph.from_edges(H.number_of_nodes(), list(H.edges()))


def to_nx(G):
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.edges().tolist())
    return H


def atlas_connected(max_n=7):
    """All connected graphs with 1..max_n vertices from the networkx atlas."""
    return [from_nx(H) for H in nx.graph_atlas_g()[1:] if H.number_of_nodes() <= max_n and nx.is_connected(H)]


def dense_B(G):
    """Non-backtracking matrix straight from its definition, for cross-checks."""
    arcs = [(i, j) for i in range(G.n) for j in G.neighbors(i)]
    pos = {a: k for k, a in enumerate(arcs)}
    B = np.zeros((len(arcs), len(arcs)))
    for (i, j), a in pos.items():
        for l in G.neighbors(j):
            if l != i:
                B[a, pos[(j, int(l))]] = 1
    return B


@st.composite
def graphs(draw, min_n=1, max_n=10, connected=False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [p for p, keep in zip(pairs, mask) if keep]
    if connected:
        edges += [(i, i + 1) for i in range(n - 1)]
    return Graph.from_edges(n, edges)


@pytest.fixture(scope="session")
def petersen():
    return corpus.petersen()


@pytest.fixture(scope="session")
def high_girth():
    return corpus.high_girth_corpus()
