import itertools
import math

import cvxpy as cp
import numpy as np
import pytest

from nbcolor import corpus
from nbcolor.errors import DomainError, SizeError
from nbcolor.graph import Graph, sample_er
from nbcolor.oracle import chi_v_exact, feasibility


def _chromatic_number(G):
    e = G.edges()
    for k in range(1, G.n + 1):
        for col in itertools.product(range(k), repeat=G.n):
            c = np.array(col)
            if not len(e) or np.all(c[e[:, 0]] != c[e[:, 1]]):
                return k
    return G.n


def _sdp_chi_v(G):
    """Independent interior-point value: min t s.t. X PSD, diag(X) = 1, X_ij <= t on edges."""
    X = cp.Variable((G.n, G.n), symmetric=True)
    t = cp.Variable()
    e = G.edges()
    cons = [X >> 0, cp.diag(X) == 1] + [X[i, j] <= t for i, j in e.tolist()]
    cp.Problem(cp.Minimize(t), cons).solve(solver=cp.CLARABEL)
    return 1 - 1 / t.value


class TestAnchors:
    @pytest.mark.parametrize("k", [3, 4, 5, 6])
    def test_complete(self, k):
        res = chi_v_exact(corpus.complete(k))
        assert res.status == "exact" and abs(res.chi_v - k) <= 1e-3

    def test_c5(self):
        res = chi_v_exact(corpus.cycle(5))
        assert abs(res.chi_v - math.sqrt(5)) <= 1e-3

    def test_petersen(self, petersen):
        res = chi_v_exact(petersen)
        assert res.status == "exact" and abs(res.chi_v - 2.5) <= 1e-2

    def test_bipartite_is_two(self):
        res = chi_v_exact(corpus.cycle(6))
        assert res.chi_v == 2.0

    def test_edgeless(self):
        res = chi_v_exact(Graph.from_edges(4, []))
        assert res.chi_v == 1.0 and res.status == "exact"

    def test_gram_invariants(self, petersen):
        res = chi_v_exact(petersen)
        P = res.gram
        e = petersen.edges()
        assert np.allclose(np.diag(P), 1, atol=1e-12)
        assert np.linalg.eigvalsh(P)[0] >= -1e-9
        assert P[e[:, 0], e[:, 1]].max() <= -1 / (res.chi_v + 1e-5 - 1) + 1e-9


class TestFeasibility:
    def test_k4(self):
        G = corpus.complete(4)
        f = feasibility(G, 4.0)
        assert f.status == "feasible"
        e = G.edges()
        assert np.allclose(f.gram[e[:, 0], e[:, 1]], -1 / 3, atol=1e-6)
        bad = feasibility(G, 3.5)
        assert bad.status == "infeasible" and bad.dual_margin > 0

    def test_c5_pentagon(self):
        f = feasibility(corpus.cycle(5), 2.3)
        assert f.status == "feasible"
        e = corpus.cycle(5).edges()
        assert f.gram[e[:, 0], e[:, 1]].max() <= math.cos(4 * math.pi / 5) + 1e-6

    def test_domain_and_size(self, petersen):
        with pytest.raises(DomainError):
            feasibility(petersen, 2.0)
        with pytest.raises(SizeError):
            chi_v_exact(corpus.cycle(65))


class TestProperties:
    @pytest.mark.parametrize("seed", range(4))
    def test_below_chromatic_number(self, seed):
        G = sample_er(9, 3.5, seed)
        if G.edge_count == 0:
            return
        assert chi_v_exact(G).chi_v <= _chromatic_number(G) + 1e-5

    def test_subgraph_monotone(self, petersen):
        tol = 1e-5
        full = chi_v_exact(petersen, tol=tol).chi_v
        minus_edge = Graph.from_edges(10, petersen.edges().tolist()[1:])
        c5 = petersen.subgraph([0, 1, 2, 3, 4])[0]
        for H in (minus_edge, c5):
            assert chi_v_exact(H, tol=tol).chi_v <= full + 2 * tol
        assert chi_v_exact(corpus.complete(4)).chi_v <= chi_v_exact(corpus.complete(5)).chi_v + 2 * tol

    @pytest.mark.parametrize("name", ["petersen", "C5", "K4", "mcgee"])
    def test_interior_point_cross_check(self, name):
        G = corpus.NAMED[name]()
        assert abs(chi_v_exact(G).chi_v - _sdp_chi_v(G)) <= 1e-4

    @pytest.mark.parametrize("seed", range(3))
    def test_interior_point_random(self, seed):
        G = sample_er(12, 4, 100 + seed)
        if G.edge_count == 0:
            return
        assert abs(chi_v_exact(G).chi_v - _sdp_chi_v(G)) <= 1e-4
