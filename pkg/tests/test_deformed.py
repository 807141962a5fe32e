import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import atlas_connected, dense_B, graphs
from nbcolor import corpus
from nbcolor.deformed import (
    DeformedLaplacian,
    is_psd,
    lambda_min,
    real_root_scan,
    smallest_real_eig_B,
)
from nbcolor.errors import EligibilityError
from nbcolor.graph import classify, sample_er

ELIGIBLE = ["K4", "K5", "petersen", "petersen_subdivided", "mcgee", "K44_plus_edge"]


def _eigencurve_min(G, z):
    """min over adjacency eigenvalues a of z^2 - a z + d - 1 (regular graphs only)."""
    d = G.degrees[0]
    a = np.linalg.eigvalsh(G.adjacency_matrix().toarray())
    return float(np.min(z * z - a * z + d - 1))


class TestOperator:
    def test_symmetric_probe(self, petersen):
        L = DeformedLaplacian(petersen)
        rng = np.random.default_rng(0)
        for z in (-2.3, 0.4, 3.0):
            u, v = rng.standard_normal((2, 10))
            assert abs(u @ L.matvec(z, v) - L.matvec(z, u) @ v) <= 1e-12 * L.scale(z) * 10

    def test_matvec_matches_matrices(self, petersen):
        L = DeformedLaplacian(petersen)
        v = np.arange(10.0)
        for z in (-1.5, 2.0):
            assert np.allclose(L.matvec(z, v), L.dense(z) @ v)
            assert np.allclose(L.sparse(z) @ v, L.dense(z) @ v)

    @given(graphs(min_n=2, max_n=10))
    @settings(max_examples=80, deadline=None)
    def test_laplacian_kills_constants(self, G):
        assert np.allclose(DeformedLaplacian(G).matvec(1.0, np.ones(G.n)), 0.0)


class TestLambdaMin:
    def test_connected_at_one(self, petersen):
        for G in (petersen, corpus.complete(4), corpus.cycle(7)):
            assert abs(lambda_min(G, 1.0)) <= 1e-8

    def test_petersen_minus_sqrt2(self, petersen):
        z = -math.sqrt(2)
        assert abs(lambda_min(petersen, z) - (4 - 2 * math.sqrt(2))) <= 1e-10
        assert abs(lambda_min(petersen, z) - _eigencurve_min(petersen, z)) <= 1e-10

    def test_k4_minus_one(self):
        assert abs(lambda_min(corpus.complete(4), -1.0) - 2.0) <= 1e-10

    def test_lanczos_agrees_with_dense(self):
        G = sample_er(700, 6, 11)
        L = DeformedLaplacian(G)
        for z in (-3.0, -1.2, 0.5):
            assert abs(L.lambda_min(z, "lanczos") - L.lambda_min(z, "dense")) <= 1e-8 * L.scale(z)

    def test_bad_mode(self, petersen):
        with pytest.raises(ValueError):
            lambda_min(petersen, 0.0, mode="qr")


class TestIsPsd:
    def test_examples(self, petersen):
        assert is_psd(corpus.complete(4), -1.0)
        assert is_psd(petersen, 0.5)
        assert is_psd(corpus.cycle(6), -1.0)
        assert not is_psd(petersen, 1.5)

    def test_sparse_path(self):
        G = sample_er(700, 6, 2)
        z_lo = -(1.0 + G.degrees.max())
        assert is_psd(G, z_lo)
        assert not is_psd(G, 2.0)


class TestSmallestRealEig:
    @pytest.mark.parametrize("name", ELIGIBLE)
    def test_psd_left_of_crossing(self, name):
        G = corpus.NAMED[name]()
        loc = smallest_real_eig_B(G)
        for eps in (1e-3, 1e-2, 0.1, 1.0):
            assert is_psd(G, loc.r_star - eps)

    @pytest.mark.parametrize("name", ["K4", "petersen", "mcgee"])
    def test_baseline(self, name):
        loc = smallest_real_eig_B(corpus.NAMED[name]())
        assert loc.r_star == -1.0 and loc.method == "baseline_minus_one"

    def test_crossing_fixture(self):
        G = corpus.bipartite_plus_edge(4, 4)
        loc = smallest_real_eig_B(G)
        assert loc.method == "bisection_crossing"
        assert abs(loc.lam_min_at_r) <= 10 * DeformedLaplacian(G).default_tol(loc.r_star)
        ev = np.linalg.eigvals(dense_B(G))
        real = ev[np.abs(ev.imag) < 1e-9].real
        assert abs(loc.r_star - real.min()) <= 1e-6
        assert loc.r_star <= -1

    def test_diagonal_dominance_start(self):
        for name in ELIGIBLE:
            G = corpus.NAMED[name]()
            assert lambda_min(G, -(1.0 + G.degrees.max())) > 0

    def test_rejects_ineligible(self):
        with pytest.raises(EligibilityError):
            smallest_real_eig_B(corpus.cycle(6))

    @given(graphs(min_n=4, max_n=8, connected=True))
    @settings(max_examples=60, deadline=None)
    def test_matches_dense_minimum(self, G):
        if not classify(G).eligible or G.edge_count <= G.n:
            return
        ev = np.linalg.eigvals(dense_B(G))
        real = ev[np.abs(ev.imag) < 1e-7].real
        loc = smallest_real_eig_B(G)
        assert loc.r_star <= -1
        assert abs(loc.r_star - min(real.min(), -1.0)) <= 1e-6


def _distinct_real(B, exclude=(-1.0, 1.0)):
    ev = np.linalg.eigvals(B)
    real = sorted(x.real for x in ev if abs(x.imag) < 1e-6 and min(abs(x.real - e) for e in exclude) > 1e-5)
    out = []
    for x in real:
        if not out or abs(x - out[-1]) > 1e-5:
            out.append(x)
    return out


class TestRealRootScan:
    def test_known_roots(self, petersen):
        for G in (petersen, corpus.complete(4)):
            roots = real_root_scan(G, -3.0, 2.5)
            assert [round(r.z, 8) for r in roots] == [1.0, 2.0]

    def test_tangential_roots_flagged(self):
        roots = real_root_scan(corpus.cycle(6), -3.0, 3.0)
        sus = [r for r in roots if r.kind == "suspected"]
        assert sus and all(r.multiplicity == 2 for r in sus)

    def test_zero_root_from_leaves(self):
        roots = real_root_scan(corpus.triangle_with_tail(2), -1.5, 1.5)
        assert any(r.z == 0.0 and r.kind == "exact" for r in roots)

    def test_atlas_agreement(self):
        # real roots of det L(z) are the real eigenvalues of B other than +-1
        checked = 0
        for G in atlas_connected(6):
            if G.edge_count <= G.n:
                continue
            span = 1.0 + G.degrees.max()
            got = [r.z for r in real_root_scan(G, -span, span) if min(abs(r.z - 1), abs(r.z + 1)) > 1e-5]
            want = _distinct_real(dense_B(G))
            assert len(got) == len(want), G.edges().tolist()
            assert np.allclose(got, want, atol=1e-6)
            checked += 1
        assert checked > 100

    @given(st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_random_eight_vertex_graphs(self, seed):
        G = sample_er(8, 3.5, seed)
        if G.edge_count <= G.n:
            return
        span = 1.0 + G.degrees.max()
        got = [r.z for r in real_root_scan(G, -span, span) if min(abs(r.z - 1), abs(r.z + 1)) > 1e-5]
        want = _distinct_real(dense_B(G))
        assert len(got) == len(want) and np.allclose(got, want, atol=1e-6)
