"""Simple undirected graphs: storage, parsing, sampling and structural analysis.

Graphs are stored in CSR form (``indptr``/``indices``) with sorted neighbor
lists.  The CSR position of the entry ``j`` in row ``i`` doubles as the index
of the directed edge ``i -> j`` (see :mod:`nbcolor.nonbacktracking`), which is
why neighbor lists must stay sorted.
"""

from __future__ import annotations

import hashlib
import io
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc

from .errors import EligibilityError, ParameterError, ParseError, SelfLoopError
from .rng import STREAM_ER, make_rng


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "indptr", "indices", "labels", "_key")

    def __init__(self, n, indptr, indices, labels=None):
        indptr = np.asarray(indptr, dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64)
        if indptr.shape != (n + 1,) or indptr[-1] != len(indices):
            raise ValueError("inconsistent CSR arrays")
        indptr.flags.writeable = False
        indices.flags.writeable = False
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.labels = None if labels is None else tuple(int(x) for x in labels)
        self._key = None
        self._check()

    @classmethod
    def from_edges(cls, n, edges, labels=None):
        """Build from an iterable of pairs; duplicates collapse, self-loops raise."""
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if len(e) and (e.min() < 0 or e.max() >= n):
            raise ValueError(f"edge endpoint out of range for n={n}")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loops are not allowed")
        u = np.minimum(e[:, 0], e[:, 1])
        v = np.maximum(e[:, 0], e[:, 1])
        key = np.unique(u * n + v) if len(e) else np.zeros(0, dtype=np.int64)
        u, v = key // n, key % n
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        return cls(n, np.cumsum(indptr), cols, labels=labels)

    def _check(self):
        src = np.repeat(np.arange(self.n), np.diff(self.indptr))
        if np.any(self.indices == src):
            raise ValueError("self-loops are not allowed")
        # strictly increasing keys <=> every row sorted without duplicates
        fwd = src * self.n + self.indices
        if np.any(np.diff(fwd) <= 0):
            raise ValueError("neighbor lists are not sorted and simple")
        if not np.array_equal(fwd, np.sort(self.indices * self.n + src)):
            raise ValueError("adjacency is not symmetric")

    # basic accessors

    @property
    def edge_count(self):
        return len(self.indices) // 2

    @property
    def degrees(self):
        return np.diff(self.indptr)

    @property
    def adjacency(self):
        return [self.neighbors(i).tolist() for i in range(self.n)]

    def neighbors(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def has_edge(self, i, j):
        row = self.neighbors(i)
        k = np.searchsorted(row, j)
        return bool(k < len(row) and row[k] == j)

    def edges(self):
        """Array of shape (|E|, 2) with ``u < v``, ascending."""
        src = np.repeat(np.arange(self.n), self.degrees)
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def adjacency_matrix(self, dtype=float):
        data = np.ones(len(self.indices), dtype=dtype)
        return sp.csr_array((data, self.indices, self.indptr), shape=(self.n, self.n))

    def subgraph(self, vertices):
        """Induced subgraph on ``vertices`` (kept in ascending order).

        Returns the subgraph and the old->new vertex map.  ``labels`` of the
        result hold the original vertex ids.
        """
        keep = np.unique(np.asarray(list(vertices), dtype=np.int64))
        new_id = np.full(self.n, -1, dtype=np.int64)
        new_id[keep] = np.arange(len(keep))
        e = self.edges()
        if len(e):
            e = new_id[e]
            e = e[(e[:, 0] >= 0) & (e[:, 1] >= 0)]
        base = self.labels
        labels = keep.tolist() if base is None else [base[k] for k in keep]
        sub = Graph.from_edges(len(keep), e, labels=labels)
        return sub, {int(k): i for i, k in enumerate(keep)}

    # serialization

    def to_text(self):
        """Canonical edge-list serialization (header + ``u v`` with u < v, ascending)."""
        out = io.StringIO()
        out.write(f"n {self.n}\n")
        for u, v in self.edges():
            out.write(f"{u} {v}\n")
        return out.getvalue()

    def digest(self):
        return hashlib.sha256(self.to_text().encode("ascii")).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        if self._key is None:
            self._key = hash((self.n, self.indices.tobytes(), self.indptr.tobytes()))
        return self._key

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


# ingestion and generation

def parse_edge_list(text, compact=False):
    """Parse ``u v`` lines into a :class:`Graph`.

    ``#`` starts a comment and blank lines are skipped.  A line ``n <N>``
    fixes the vertex count; otherwise it is ``1 + max id``.  With
    ``compact=True`` the ids actually used are relabelled ``0..k-1`` and the
    original ids are kept in ``Graph.labels``.
    """
    if not isinstance(text, str):
        text = text.read()
    declared = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "n":
            if len(tok) != 2 or not tok[1].isdigit():
                raise ParseError(f"malformed header {raw.strip()!r}", lineno)
            if declared is not None:
                raise ParseError("duplicate 'n' header", lineno)
            declared = int(tok[1])
            continue
        if len(tok) != 2:
            raise ParseError(f"expected 'u v', got {raw.strip()!r}", lineno)
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise ParseError(f"non-integer vertex id in {raw.strip()!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError("vertex ids must be non-negative", lineno)
        if u == v:
            raise SelfLoopError(f"self-loop at vertex {u}", lineno)
        pairs.append((u, v, lineno))

    if compact:
        used = sorted({u for u, _, _ in pairs} | {v for _, v, _ in pairs})
        remap = {x: i for i, x in enumerate(used)}
        edges = [(remap[u], remap[v]) for u, v, _ in pairs]
        return Graph.from_edges(len(used), edges, labels=used)

    n = 1 + max((max(u, v) for u, v, _ in pairs), default=-1)
    if declared is not None:
        for u, v, lineno in pairs:
            if max(u, v) >= declared:
                raise ParseError(f"vertex id {max(u, v)} exceeds header n={declared}", lineno)
        n = declared
    return Graph.from_edges(n, [(u, v) for u, v, _ in pairs])


def read_graph(path, compact=False):
    with open(path) as fh:
        return parse_edge_list(fh.read(), compact=compact)


def write_graph(G, path):
    with open(path, "w") as fh:
        fh.write(G.to_text())


def sample_er(n, d, seed):
    """Erdos-Renyi G(n, d/n): every pair is an edge independently with probability d/n.

    Implemented by drawing the edge count from Binomial(C(n,2), d/n) and then
    a uniformly random set of that many distinct pairs, which has the same law.
    """
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    if not 0 < d < n:
        raise ParameterError(f"need 0 < d < n, got d={d}, n={n}")
    rng = make_rng(seed, STREAM_ER)
    total = n * (n - 1) // 2
    m = int(rng.binomial(total, d / n))
    picks = np.sort(rng.choice(total, size=m, replace=False)) if m else np.zeros(0, dtype=np.int64)
    # row i holds pairs (i, j>i) starting at offset i*n - i*(i+1)/2
    rows = np.arange(n, dtype=np.int64)
    start = rows * n - rows * (rows + 1) // 2
    i = np.searchsorted(start, picks, side="right") - 1
    j = picks - start[i] + i + 1
    return Graph.from_edges(n, np.column_stack([i, j]))


# structural analyses

def connected_components(G):
    """Vertex arrays of the connected components, largest first."""
    if G.n == 0:
        return []
    k, lab = _cc(G.adjacency_matrix(), directed=False)
    comps = [np.flatnonzero(lab == c) for c in range(k)]
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def is_connected(G):
    return G.n > 0 and len(connected_components(G)) == 1


def _peel(G, k):
    """Vertices surviving repeated deletion of vertices with degree < k."""
    deg = G.degrees.copy()
    alive = np.ones(G.n, dtype=bool)
    order = []
    queue = deque(np.flatnonzero(deg < k).tolist())
    while queue:
        u = queue.popleft()
        if not alive[u]:
            continue
        alive[u] = False
        order.append(u)
        for w in G.neighbors(u):
            if alive[w]:
                deg[w] -= 1
                if deg[w] == k - 1:
                    queue.append(int(w))
    return alive, order


def two_core(G):
    """2-core of ``G`` plus the old->new vertex map (empty graph for forests)."""
    alive, _ = _peel(G, 2)
    return G.subgraph(np.flatnonzero(alive))


def girth(G):
    """Length of a shortest cycle, or ``None`` for forests."""
    best = None
    dist = np.full(G.n, -1, dtype=np.int64)
    parent = np.full(G.n, -1, dtype=np.int64)
    indptr, indices = G.indptr, G.indices
    for root in range(G.n):
        if indptr[root + 1] - indptr[root] < 2:
            continue
        touched = [root]
        dist[root] = 0
        frontier = [root]
        depth = 0
        while frontier and (best is None or 2 * depth + 1 < best):
            nxt = []
            for u in frontier:
                for w in indices[indptr[u]:indptr[u + 1]]:
                    if dist[w] < 0:
                        dist[w] = depth + 1
                        parent[w] = u
                        touched.append(w)
                        nxt.append(w)
                    elif w != parent[u]:
                        c = dist[u] + dist[w] + 1
                        if best is None or c < best:
                            best = int(c)
            frontier = nxt
            depth += 1
        dist[touched] = -1
        parent[touched] = -1
        if best == 3:
            break
    return best


def two_coloring(G):
    """Proper 2-coloring as an int array of 0/1, or ``None`` if G has an odd cycle."""
    color = np.full(G.n, -1, dtype=np.int64)
    for s in range(G.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in G.neighbors(u):
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    queue.append(int(w))
                elif color[w] == color[u]:
                    return None
    return color


def is_bipartite(G):
    return two_coloring(G) is not None


def average_degree(G):
    if G.n < 1:
        raise ParameterError("average degree of the empty graph is undefined")
    return Fraction(2 * G.edge_count, G.n)


@dataclass(frozen=True)
class Ball:
    center: int
    radius: int
    dist: dict
    parent: dict

    def layers(self):
        out = [[] for _ in range(self.radius + 1)]
        for v, d in self.dist.items():
            out[d].append(v)
        while len(out) > 1 and not out[-1]:
            out.pop()
        return [sorted(layer) for layer in out]


def bfs_ball(G, i, m):
    """Distances and BFS parents for every vertex within distance ``m`` of ``i``."""
    dist = {int(i): 0}
    parent = {int(i): -1}
    frontier = [int(i)]
    for d in range(1, m + 1):
        nxt = []
        for u in frontier:
            for w in G.neighbors(u):
                w = int(w)
                if w not in dist:
                    dist[w] = d
                    parent[w] = u
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return Ball(int(i), m, dist, parent)


def greedy_color_2degenerate(G):
    """Proper coloring with colors {1,2,3} of a graph with empty 3-core."""
    alive, order = _peel(G, 3)
    if alive.any():
        raise EligibilityError(
            f"graph has a nonempty 3-core ({int(alive.sum())} vertices); 3-coloring by peeling fails")
    color = {}
    for u in reversed(order):
        used = {color[w] for w in G.neighbors(u).tolist() if w in color}
        color[u] = min({1, 2, 3} - used)
    return color


# eligibility

@dataclass(frozen=True)
class EligibilityReport:
    connected: bool
    two_core_size: int
    core_components: int
    is_cycle: bool
    is_bipartite: bool
    period: int | None
    min_core_degree: int
    girth: int | None
    m_max: int | None
    reasons: tuple = field(default=())

    @property
    def eligible(self):
        return not self.reasons

    def as_dict(self):
        return {
            "connected": self.connected,
            "two_core_size": self.two_core_size,
            "core_components": self.core_components,
            "is_cycle": self.is_cycle,
            "is_bipartite": self.is_bipartite,
            "period": self.period,
            "min_core_degree": self.min_core_degree,
            "girth": "acyclic" if self.girth is None else self.girth,
            "m_max": self.m_max,
            "eligible": self.eligible,
            "reasons": list(self.reasons),
        }


def classify(G):
    """Structural report deciding whether the Perron machinery applies to ``G``.

    Eligible means: nonempty and connected 2-core that is not a cycle, not
    bipartite, and whose non-backtracking operator has period 1.
    """
    from .nonbacktracking import period as nb_period

    core, _ = two_core(G)
    comps = connected_components(core) if core.n else []
    bip = is_bipartite(G)
    g = girth(G)
    deg = core.degrees
    is_cycle = len(comps) == 1 and bool(np.all(deg == 2))
    per = None
    if comps:
        main = core if len(comps) == 1 else core.subgraph(comps[0])[0]
        per = nb_period(main)

    reasons = []
    if core.n == 0:
        reasons.append("empty 2-core")
    if len(comps) > 1:
        reasons.append(f"2-core has {len(comps)} components")
    if is_cycle:
        reasons.append("2-core is a cycle (B reducible)")
    if bip:
        reasons.append("bipartite")
    if per is not None and per != 1 and not is_cycle:
        reasons.append(f"non-backtracking period {per}")
    return EligibilityReport(
        connected=is_connected(G),
        two_core_size=core.n,
        core_components=len(comps),
        is_cycle=is_cycle,
        is_bipartite=bip,
        period=per,
        min_core_degree=int(deg.min()) if core.n else 0,
        girth=g,
        m_max=None if g is None else (g - 1) // 2,
        reasons=tuple(reasons),
    )


def require_eligible(G, report=None):
    report = classify(G) if report is None else report
    if not report.eligible:
        raise EligibilityError("ineligible graph: " + "; ".join(report.reasons))
    return report
