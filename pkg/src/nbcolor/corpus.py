"""Small named graphs used as fixtures and reference instances."""

from itertools import combinations

from .graph import Graph


def complete(k):
    return Graph.from_edges(k, list(combinations(range(k), 2)))


def cycle(k):
    return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def path(k):
    return Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def star(k):
    """Star on ``k`` vertices (one hub, k-1 leaves)."""
    return Graph.from_edges(k, [(0, i) for i in range(1, k)])


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def lcf(n, shifts, repeats):
    """Cubic Hamiltonian graph from LCF notation ``[shifts]^repeats``."""
    edges = [(i, (i + 1) % n) for i in range(n)]
    seq = list(shifts) * repeats
    for i, s in enumerate(seq):
        edges.append((i, (i + s) % n))
    return Graph.from_edges(n, edges)


def mcgee():
    """The McGee graph: 24 vertices, 3-regular, girth 7."""
    return lcf(24, [12, 7, -7], 8)


def heawood():
    return lcf(14, [5, -5], 7)


def subdivide(G, p, which=None):
    """Replace each edge (or only the edges listed in ``which``) by a path of length ``p``."""
    targets = {tuple(e) for e in G.edges().tolist()} if which is None else {tuple(sorted(e)) for e in which}
    edges = []
    n = G.n
    for u, v in G.edges().tolist():
        if (u, v) not in targets or p == 1:
            edges.append((u, v))
            continue
        chain = [u] + list(range(n, n + p - 1)) + [v]
        n += p - 1
        edges.extend(zip(chain, chain[1:]))
    return Graph.from_edges(n, edges)


def petersen_subdivided():
    """Petersen with the edge 0-1 subdivided once: irregular, girth 5, period 1."""
    return subdivide(petersen(), 2, which=[(0, 1)])


def triangle_with_tail(length=3):
    edges = [(0, 1), (1, 2), (2, 0)]
    chain = [0] + list(range(3, 3 + length))
    edges.extend(zip(chain, chain[1:]))
    return Graph.from_edges(3 + length, edges)


def theta_graph(a, b, c):
    """Two hub vertices joined by three internally disjoint paths of lengths a, b, c."""
    edges = []
    n = 2
    for length in (a, b, c):
        chain = [0] + list(range(n, n + length - 1)) + [1]
        n += length - 1
        edges.extend(zip(chain, chain[1:]))
    return Graph.from_edges(n, edges)


def complete_bipartite(a, b):
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def bipartite_plus_edge(a, b):
    """K_{a,b} with one extra edge inside the first side (non-bipartite, near-bipartite)."""
    G = complete_bipartite(a, b)
    return Graph.from_edges(G.n, G.edges().tolist() + [(0, 1)])


NAMED = {
    "K3": lambda: complete(3),
    "K4": lambda: complete(4),
    "K5": lambda: complete(5),
    "C5": lambda: cycle(5),
    "C6": lambda: cycle(6),
    "petersen": petersen,
    "petersen_subdivided": petersen_subdivided,
    "mcgee": mcgee,
    "heawood": heawood,
    "K4_subdivided3": lambda: subdivide(complete(4), 3),
    "triangle_tail": triangle_with_tail,
    "K44_plus_edge": lambda: bipartite_plus_edge(4, 4),
}


def high_girth_corpus():
    """Eligible graphs with girth >= 5 and n <= 30 (sandwich tests)."""
    return {
        "petersen": petersen(),
        "petersen_subdivided": petersen_subdivided(),
        "mcgee": mcgee(),
        "theta_5_5_6": theta_graph(5, 5, 6),
    }
