"""The non-backtracking operator B acting on functions of directed edges.

B is never stored as a matrix outside :func:`dense_matrix`; everything else
goes through :func:`nb_matvec`, which costs O(|E|) using

    (Bx)[i->j] = sum over l in N(j) of x[j->l]  -  x[j->i].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, EligibilityError, SizeError
from .graph import Graph, classify, connected_components, two_core


@dataclass(frozen=True, eq=False)
class DirectedEdgeIndex:
    """Directed edges ``src[e] -> dst[e]`` in lexicographic order; ``rev[e]`` is the reversal."""

    n: int
    src: np.ndarray
    dst: np.ndarray
    rev: np.ndarray
    indptr: np.ndarray

    def __len__(self):
        return len(self.src)

    def index(self, i, j):
        lo, hi = self.indptr[i], self.indptr[i + 1]
        k = lo + np.searchsorted(self.dst[lo:hi], j)
        if k >= hi or self.dst[k] != j:
            raise KeyError(f"{i}->{j} is not a directed edge")
        return int(k)

    def pair(self, e):
        return int(self.src[e]), int(self.dst[e])

    def out_edges(self, i):
        return range(self.indptr[i], self.indptr[i + 1])


def edge_index(G):
    src = np.repeat(np.arange(G.n), G.degrees)
    dst = G.indices
    keys = src * G.n + dst
    rev = np.searchsorted(keys, dst * G.n + src)
    return DirectedEdgeIndex(G.n, src, dst, rev, G.indptr)


def nb_matvec(G, idx, x):
    x = np.asarray(x)
    if x.shape != (len(idx),):
        raise ValueError(f"expected a vector of length {len(idx)}, got shape {x.shape}")
    if np.iscomplexobj(x):
        return nb_matvec(G, idx, x.real) + 1j * nb_matvec(G, idx, x.imag)
    out_sum = np.bincount(idx.src, weights=x, minlength=idx.n)
    return out_sum[idx.dst] - x[idx.rev]


def dense_matrix(G, idx=None, max_edges=4000):
    idx = edge_index(G) if idx is None else idx
    m2 = len(idx)
    if m2 > max_edges:
        raise SizeError(f"dense B would be {m2}x{m2}; limit is {max_edges}")
    B = np.zeros((m2, m2))
    p, s = _arcs(idx, np.arange(m2))
    B[p, s] = 1.0
    return B


def _arcs(idx, edges):
    """All non-backtracking transitions e -> f with e in ``edges``."""
    j = idx.dst[edges]
    starts = idx.indptr[j]
    counts = idx.indptr[j + 1] - starts
    pred = np.repeat(edges, counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    succ = np.repeat(starts, counts) + offsets
    keep = succ != idx.rev[pred]
    return pred[keep], succ[keep]


def period(G, idx=None):
    """Period of B on the 2-core of ``G`` (its largest component if disconnected).

    Standard BFS-level algorithm: the gcd of ``level[e] + 1 - level[f]`` over
    all transitions e -> f reachable from a start edge.  On a cycle B is
    reducible; the orbit of one orientation gives the cycle length.
    """
    if idx is None:
        core, _ = two_core(G)
        if core.n == 0:
            raise EligibilityError("empty 2-core: B is nilpotent and has no period")
        comps = connected_components(core)
        if len(comps) > 1:
            core = core.subgraph(comps[0])[0]
        idx = edge_index(core)
    level = np.full(len(idx), -1, dtype=np.int64)
    level[0] = 0
    frontier = np.array([0])
    depth = 0
    while len(frontier):
        _, succ = _arcs(idx, frontier)
        succ = np.unique(succ)
        succ = succ[level[succ] < 0]
        depth += 1
        level[succ] = depth
        frontier = succ
    reached = np.flatnonzero(level >= 0)
    g = 0
    for chunk in np.array_split(reached, max(1, len(reached) // 50000)):
        p, s = _arcs(idx, chunk)
        g = math.gcd(g, int(np.gcd.reduce(np.abs(level[p] + 1 - level[s]))))
    return g


@dataclass(frozen=True, eq=False)
class PerronData:
    """Spectral radius ``rho`` of B and its positive right eigenvector ``phi``.

    ``phi`` is normalized so that ``phi_vertex.sum() == 1`` where
    ``phi_vertex[i]`` sums ``phi`` over the out-edges of ``i``.  ``graph`` is
    the (2-core) graph the data lives on; its ``labels`` map back to the
    caller's vertex ids when it is a proper subgraph.
    """

    rho: float
    phi: np.ndarray
    phi_vertex: np.ndarray
    residual: float
    iterations: int
    graph: Graph
    index: DirectedEdgeIndex

    def edge_equation_residuals(self):
        """|(B phi)[i->j] - rho phi[i->j]| per directed edge."""
        return np.abs(nb_matvec(self.graph, self.index, self.phi) - self.rho * self.phi)

    def vertex_identity_residuals(self):
        """|phi_i - phi[i->j] - rho phi[j->i]| per directed edge i->j."""
        idx = self.index
        return np.abs(self.phi_vertex[idx.src] - self.phi[np.arange(len(idx))] - self.rho * self.phi[idx.rev])


def perron(G, idx=None, tol=1e-10, max_iter=10**6, check=True):
    """Perron eigenpair of B by power iteration from the all-ones vector.

    If ``G`` has vertices outside its 2-core the computation runs on the
    2-core and the returned :class:`PerronData` refers to that graph.
    """
    if check:
        report = classify(G)
        if not report.eligible:
            raise EligibilityError("perron needs an eligible graph: " + "; ".join(report.reasons))
    if G.n and G.degrees.min() < 2:
        G, _ = two_core(G)
        idx = None
    idx = edge_index(G) if idx is None else idx

    x = np.ones(len(idx)) / len(idx)
    best = np.inf
    check_every = 8
    for it in range(1, max_iter + 1):
        y = nb_matvec(G, idx, x)
        s = y.sum()
        if s <= 0:
            raise EligibilityError("B annihilates the all-ones vector (no cycles in the 2-core)")
        if it % check_every == 0 or it == max_iter:
            rho = s / x.sum()
            res = np.max(np.abs(y - rho * x)) / np.max(np.abs(x))
            best = min(best, res)
            if res <= tol:
                phi = x
                break
        x = y / s
    else:
        raise ConvergenceError(f"power iteration did not reach residual {tol:g} in {max_iter} steps", best)

    phi_vertex = np.bincount(idx.src, weights=phi, minlength=G.n)
    total = phi_vertex.sum()
    phi = phi / total
    phi_vertex = phi_vertex / total
    rho = float(nb_matvec(G, idx, phi).sum() / phi.sum())
    residual = float(np.max(np.abs(nb_matvec(G, idx, phi) - rho * phi)) / np.max(phi))
    if np.any(phi <= 0):
        raise ConvergenceError("Perron vector has non-positive entries", residual)
    phi.flags.writeable = False
    phi_vertex.flags.writeable = False
    return PerronData(rho, phi, phi_vertex, residual, it, G, idx)


# Ihara-Bass

def _laplacian_dense(G, z):
    A = G.adjacency_matrix().toarray()
    return (z * z - 1) * np.eye(G.n) - z * A + np.diag(G.degrees.astype(float))


def ihara_bass_sides(G, z, idx=None, max_edges=4000):
    """(det(zI - B), (z^2-1)^(|E|-|V|) det L(z)) by dense LU."""
    idx = edge_index(G) if idx is None else idx
    B = dense_matrix(G, idx, max_edges=max_edges)
    lhs = np.linalg.det(z * np.eye(len(idx)) - B)
    k = G.edge_count - G.n
    w = z * z - 1
    if k < 0 and w == 0:
        raise ValueError("(z^2-1)^(|E|-|V|) is undefined at z = +-1 for forests")
    rhs = w**k * np.linalg.det(_laplacian_dense(G, z))
    return lhs, rhs


def ihara_bass_check(G, z_samples, max_vertices=300):
    """Largest relative discrepancy of the Ihara-Bass identity over ``z_samples``."""
    if G.n > max_vertices:
        raise SizeError(f"dense determinants limited to n <= {max_vertices}, got {G.n}")
    idx = edge_index(G)
    worst = 0.0
    for z in z_samples:
        lhs, rhs = ihara_bass_sides(G, z, idx)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0))
    return worst


def bareiss_det(M):
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    a = [[int(v) for v in row] for row in M]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1] if n else 1


def ihara_bass_exact(G, z):
    """Both sides of the identity in exact integer arithmetic for integer ``z`` (|z| != 1)."""
    z = int(z)
    idx = edge_index(G)
    B = dense_matrix(G, idx).astype(np.int64)
    lhs = bareiss_det((z * np.eye(len(idx), dtype=np.int64) - B).tolist())
    A = G.adjacency_matrix(dtype=np.int64).toarray()
    L = (z * z - 1) * np.eye(G.n, dtype=np.int64) - z * A + np.diag(G.degrees)
    k = G.edge_count - G.n
    det_l = bareiss_det(L.tolist())
    if k >= 0:
        return lhs, (z * z - 1) ** k * det_l
    q, r = divmod(det_l, (z * z - 1) ** (-k))
    if r:
        raise ArithmeticError("det L(z) not divisible by (z^2-1)^(|V|-|E|)")
    return lhs, q
