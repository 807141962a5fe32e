"""Explicit vector colorings from a Perron-weighted non-backtracking walk.

For a graph of girth at least 2m + 1, vertex ``i`` gets the vector

    (v_i)_j = m^(-1/2) (-1)^s sqrt(P_i[X_s = j]),   s = dist(i, j) in 1..m,

where X is the non-backtracking walk whose first step from ``i`` picks
``j`` with probability phi[i->j] / phi_i and whose later steps move
``j -> k -> l`` with probability phi[k->l] / (rho phi[j->k]).  Along the
unique path the product telescopes to phi[pred(j) -> j] / (rho^(s-1) phi_i).

Coordinates are indexed by the arrival directed edge pred(j) -> j rather
than by j itself.  Under girth 2m + 2 the two choices give identical Gram
matrices; at girth exactly 2m + 1 a vertex can sit at distance m from both
ends of an edge, reached along two different arrival edges, and indexing by
vertex would add positive cross terms that break the edge bound.

Also here: feasibility checking of a coloring, the three-part patching
combinator, the pair-absorbing set expansion, and the unit-trace witness
that bounds lambda_min(L(z)) from above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.io
import scipy.sparse as sp

from .deformed import DeformedLaplacian
from .errors import DomainError, EligibilityError, ParameterError, StructureError
from .graph import bfs_ball, classify, girth, is_connected
from .nonbacktracking import perron

PSD_SHIFT = 1e-10
# eigenvector residual for the walk; layer sums inherit roughly this accuracy
WALK_TOL = 1e-13
DENSE_PSD_LIMIT = 2000


@dataclass(frozen=True, eq=False)
class WalkModel:
    """Transition rule of the Perron-weighted non-backtracking walk."""

    perron: object

    @property
    def rho(self):
        return self.perron.rho

    def edge_weight(self, i, j):
        return float(self.perron.phi[self.perron.index.index(i, j)])

    def first_step(self, i, j):
        return self.edge_weight(i, j) / float(self.perron.phi_vertex[i])

    def step(self, j, k, l):
        """Probability of moving k -> l having arrived at k from j."""
        if l == j:
            return 0.0
        return self.edge_weight(k, l) / (self.rho * self.edge_weight(j, k))

    def outgoing_totals(self):
        """Total outgoing probability of every state: first steps, then every directed edge."""
        p = self.perron
        idx = p.index
        first = np.bincount(idx.src, weights=p.phi, minlength=idx.n) / p.phi_vertex
        later = (np.bincount(idx.src, weights=p.phi, minlength=idx.n)[idx.dst] - p.phi[idx.rev]) / (self.rho * p.phi)
        return first, later


def walk_model(G, tol=WALK_TOL):
    return WalkModel(perron(G, tol=tol))


def _require_walk_graph(G, m):
    report = classify(G)
    if not report.eligible:
        raise EligibilityError("vector construction needs an eligible graph: " + "; ".join(report.reasons))
    if not is_connected(G) or G.degrees.min() < 2:
        raise EligibilityError("vector construction needs a connected graph of minimum degree 2 (its own 2-core)")
    if m is None:
        if report.m_max < 2:
            raise EligibilityError(f"girth {report.girth} gives m_max = {report.m_max}; the construction needs girth >= 5")
        m = report.m_max
    if m < 2:
        raise ParameterError(f"radius m = {m} < 2 makes the walk bound vacuous (m_max = {report.m_max})")
    if report.girth is not None and report.girth < 2 * m + 1:
        raise EligibilityError(f"girth {report.girth} < 2m + 1 = {2 * m + 1}; largest admissible m is {report.m_max}")
    return m, report


def _ball_probs(wm, ball):
    """walk_prob for every vertex in the ball except its center, via the telescoped form."""
    i = ball.center
    phi_i = float(wm.perron.phi_vertex[i])
    out = {}
    for j, s in ball.dist.items():
        if s == 0:
            continue
        out[j] = wm.edge_weight(ball.parent[j], j) / (wm.rho ** (s - 1) * phi_i)
    return out


def walk_prob(G, wm, i, j, m=None):
    """P_i[X_s = j] for s = dist(i, j), which must lie in 1..m (m defaults to the girth cap)."""
    g = girth(G)
    cap = (g - 1) // 2 if g is not None else G.n
    m = cap if m is None else m
    if m > cap:
        raise DomainError(f"radius {m} exceeds the girth cap {cap}")
    ball = bfs_ball(G, i, m)
    s = ball.dist.get(int(j))
    if s is None or s < 1:
        raise DomainError(f"dist({i}, {j}) must lie in 1..{m}")
    return wm.edge_weight(ball.parent[j], j) / (wm.rho ** (s - 1) * float(wm.perron.phi_vertex[i]))


@dataclass(eq=False)
class VectorColoring:
    """Unit vectors (rows of a sparse matrix) and the vector-chromatic value they achieve."""

    vectors: sp.csr_array
    edges: np.ndarray
    edge_gram: np.ndarray
    kappa: float
    m: int | None = None
    rho: float | None = None
    guarantee: float | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_vectors(cls, G, V, **kw):
        V = sp.csr_array(V)
        if V.shape[0] != G.n:
            raise ValueError(f"need one vector per vertex ({G.n}), got {V.shape[0]}")
        e = G.edges()
        eg = _row_dots(V, e)
        return cls(V, e, eg, _kappa_from(eg), **kw)

    @property
    def n(self):
        return self.vectors.shape[0]

    @property
    def dim(self):
        return self.vectors.shape[1]

    @property
    def gram(self):
        return (self.vectors @ self.vectors.T).toarray()

    def norms(self):
        return np.sqrt(np.asarray(self.vectors.multiply(self.vectors).sum(axis=1)).ravel())

    def dense_vectors(self):
        return self.vectors.toarray()


def _row_dots(V, pairs):
    if len(pairs) == 0:
        return np.zeros(0)
    return np.asarray(V[pairs[:, 0]].multiply(V[pairs[:, 1]]).sum(axis=1)).ravel()


def _kappa_from(edge_gram):
    if len(edge_gram) == 0:
        return 1.0
    worst = float(edge_gram.max())
    return math.inf if worst >= 0 else 1.0 + 1.0 / abs(worst)


def walk_guarantee(rho, m):
    """Upper bound (rho + 1) / (2 (1 - 1/m) sqrt(rho)) + 1 on the constructed value."""
    return (rho + 1) / (2 * (1 - 1 / m) * math.sqrt(rho)) + 1


def edge_inner_bound(rho, m):
    """-(1 - 1/m) 2 sqrt(rho) / (rho + 1): every edge inner product is at most this."""
    return -(1 - 1 / m) * 2 * math.sqrt(rho) / (rho + 1)


def build_vectors(G, m=None, wm=None):
    m, _ = _require_walk_graph(G, m)
    wm = walk_model(G) if wm is None else wm
    idx = wm.perron.index
    rows, cols, vals = [], [], []
    scale = 1.0 / math.sqrt(m)
    for i in range(G.n):
        ball = bfs_ball(G, i, m)
        for j, p in _ball_probs(wm, ball).items():
            rows.append(i)
            cols.append(idx.index(ball.parent[j], j))
            vals.append(scale * (-1) ** ball.dist[j] * math.sqrt(p))
    V = sp.csr_array((vals, (rows, cols)), shape=(G.n, len(idx)))
    V.sort_indices()
    rho = wm.rho
    vc = VectorColoring.from_vectors(G, V, m=m, rho=rho, guarantee=walk_guarantee(rho, m))
    vc.extra["phi_vertex"] = wm.perron.phi_vertex
    return vc


@dataclass
class ColoringCheck:
    ok: bool
    kappa_claim: float
    threshold: float
    worst_edge: tuple | None
    worst_value: float | None
    max_norm_error: float
    psd_checked: bool
    reasons: list

    def __bool__(self):
        return self.ok


def verify_coloring(G, vc, kappa_claim, tol=1e-9, psd_shift=PSD_SHIFT):
    """Check unit norms, PSD-ness of the Gram matrix and every edge constraint at ``kappa_claim``."""
    reasons = []
    if kappa_claim <= 1:
        raise DomainError("kappa_claim must exceed 1")
    threshold = -1.0 / (kappa_claim - 1)
    V = sp.csr_array(vc.vectors)
    norm_err = float(np.max(np.abs(vc.norms() - 1.0))) if G.n else 0.0
    if norm_err > tol:
        reasons.append(f"norms deviate from 1 by up to {norm_err:.3e}")
    psd_checked = G.n <= DENSE_PSD_LIMIT
    if psd_checked and G.n:
        P = (V @ V.T).toarray()
        try:
            np.linalg.cholesky(P + psd_shift * np.eye(G.n))
        except np.linalg.LinAlgError:
            reasons.append("Gram matrix failed the shifted Cholesky test")
    e = G.edges()
    worst_edge = worst = None
    if len(e):
        eg = _row_dots(V, e)
        k = int(np.argmax(eg))
        worst_edge, worst = (int(e[k, 0]), int(e[k, 1])), float(eg[k])
        if worst > threshold + tol:
            reasons.append(f"edge {worst_edge}: inner product {worst:.9f} > {threshold:.9f}")
    return ColoringCheck(not reasons, float(kappa_claim), threshold, worst_edge, worst, norm_err, psd_checked, reasons)


# Patching

def _simplex_directions():
    # three unit vectors in the plane at pairwise inner product -1/2
    return np.array([[math.cos(2 * math.pi * c / 3), math.sin(2 * math.pi * c / 3)] for c in range(3)])


def patch_colorings(G, lambda_set, vc, upsilon, sigma, boundary):
    """Merge a vector coloring on ``lambda_set`` with a 3-coloring ``sigma`` of ``upsilon``.

    ``vc`` holds one vector per vertex of ``sorted(lambda_set)`` (the row
    order of ``G.subgraph(lambda_set)``) with edge inner products at most
    -1/(kappa - 1).  Three new coordinates carry a unit vector ``zeta`` and a
    planar simplex ``w_1, w_2, w_3``:

    * lambda vertex: sqrt(kappa^2 - 1)/kappa v_i - zeta/kappa
    * boundary vertex: zeta
    * upsilon vertex: sqrt(8)/3 w_sigma(i) - zeta/3

    Edges touching ``lambda_set`` end up at most -1/kappa, the others at
    exactly -1/3, so the result is feasible at max(kappa + 1, 4).
    """
    lam = sorted(int(v) for v in lambda_set)
    ups = sorted(int(v) for v in upsilon)
    bnd = sorted(int(v) for v in boundary)
    part = np.full(G.n, -1)
    for code, group in enumerate((lam, bnd, ups)):
        for v in group:
            if part[v] != -1:
                raise StructureError(f"vertex {v} appears in more than one part")
            part[v] = code
    if np.any(part < 0):
        raise StructureError(f"vertices {np.flatnonzero(part < 0).tolist()} belong to no part")
    e = G.edges()
    pu, pv = part[e[:, 0]], part[e[:, 1]]
    if np.any((pu == 1) & (pv == 1)):
        raise StructureError("boundary set is not independent")
    if np.any(((pu == 0) & (pv == 2)) | ((pu == 2) & (pv == 0))):
        raise StructureError("an edge joins lambda_set and upsilon directly")
    for u, v in e[(pu == 2) & (pv == 2)].tolist():
        if sigma[u] == sigma[v]:
            raise StructureError(f"sigma is not proper on edge ({u}, {v})")
    if any(sigma[v] not in (1, 2, 3) for v in ups):
        raise StructureError("sigma must take values in {1, 2, 3}")

    if lam:
        if vc is None or vc.vectors.shape[0] != len(lam):
            raise StructureError("vc must hold one vector per lambda vertex")
        kappa = float(vc.kappa)
        base = sp.csr_array(vc.vectors)
        dim = base.shape[1]
    else:
        kappa, dim = None, 0
    zeta = dim + 2
    W = _simplex_directions()
    rows, cols, vals = [], [], []
    if lam:
        a = math.sqrt(kappa * kappa - 1) / kappa
        coo = base.tocoo()
        lam_arr = np.array(lam)
        rows.extend(lam_arr[coo.row].tolist())
        cols.extend(coo.col.tolist())
        vals.extend((a * coo.data).tolist())
        rows.extend(lam)
        cols.extend([zeta] * len(lam))
        vals.extend([-1.0 / kappa] * len(lam))
    rows.extend(bnd)
    cols.extend([zeta] * len(bnd))
    vals.extend([1.0] * len(bnd))
    c8 = math.sqrt(8) / 3
    for v in ups:
        w = W[sigma[v] - 1]
        rows.extend([v, v, v])
        cols.extend([dim, dim + 1, zeta])
        vals.extend([c8 * w[0], c8 * w[1], -1.0 / 3])
    V = sp.csr_array((vals, (rows, cols)), shape=(G.n, dim + 3))
    V.sort_indices()
    target = max(kappa + 1, 4.0) if kappa is not None else 4.0
    out = VectorColoring.from_vectors(G, V)
    out.extra.update(target_kappa=target, input_kappa=kappa)
    return out


@dataclass(frozen=True)
class Expansion:
    members: frozenset
    boundary: frozenset
    pairs_added: int


def expand_uncolorable(G, upsilon0):
    """Grow a vertex set by adjacent pairs outside it that both touch it.

    Stops when no such pair exists, at which point the outer boundary is an
    independent set.
    """
    S = np.zeros(G.n, dtype=bool)
    S[list(upsilon0)] = True
    indptr, indices = G.indptr, G.indices
    touch = np.zeros(G.n, dtype=np.int64)
    for v in np.flatnonzero(S):
        touch[indices[indptr[v]:indptr[v + 1]]] += 1
    added = 0
    queue = list(np.flatnonzero(~S & (touch > 0)))
    while queue:
        i = int(queue.pop())
        if S[i] or touch[i] == 0:
            continue
        for j in indices[indptr[i]:indptr[i + 1]]:
            j = int(j)
            if not S[j] and touch[j] > 0:
                S[i] = S[j] = True
                added += 1
                for v in (i, j):
                    nb = indices[indptr[v]:indptr[v + 1]]
                    touch[nb] += 1
                    queue.extend(int(w) for w in nb if not S[w])
                break
    boundary = np.flatnonzero(~S & (touch > 0))
    return Expansion(frozenset(np.flatnonzero(S).tolist()), frozenset(boundary.tolist()), added)


# Witness for the upper bound on lambda_min(L(z))

@dataclass(eq=False)
class Witness:
    X: sp.csr_array
    value: float
    closed_form: float
    z: float
    m: int
    rho: float

    def trace(self):
        return float(self.X.diagonal().sum())


def witness_closed_form(z, rho, m):
    return z * z + 2 * (1 - 1 / m) * math.sqrt(rho) * z + rho


def alon_boppana_witness(G, m=None, z=-1.0, vc=None):
    """Unit-trace PSD X with X_ij = sqrt(phi_i phi_j) <v_i, v_j>; its pairing with L(z) bounds lambda_min."""
    if not z < 0:
        raise DomainError(f"z must be negative, got {z}")
    if vc is None:
        vc = build_vectors(G, m)
    m = vc.m
    phi = vc.extra.get("phi_vertex")
    if phi is None:
        phi = perron(G, tol=WALK_TOL).phi_vertex
    s = sp.diags_array(np.sqrt(phi))
    X = sp.csr_array(s @ (vc.vectors @ vc.vectors.T) @ s)
    L = DeformedLaplacian(G)
    value = float(X.multiply(L.sparse(z)).sum())
    return Witness(X, value, witness_closed_form(z, vc.rho, m), float(z), m, float(vc.rho))


# Export

def write_gram(vc, path, comment=""):
    """Gram matrix in MatrixMarket coordinate format (symmetric)."""
    G = sp.coo_array(vc.vectors @ vc.vectors.T)
    scipy.io.mmwrite(path, G, comment=comment, symmetry="symmetric", precision=17)


def write_vectors(vc, path, comment=""):
    header = f"{vc.n} {vc.dim}" + (f"\n{comment}" if comment else "")
    np.savetxt(path, vc.dense_vectors(), fmt="%.17g", header=header)


def read_vectors(path):
    return np.loadtxt(path, ndmin=2)


def read_gram(path):
    return sp.csr_array(scipy.io.mmread(path))
