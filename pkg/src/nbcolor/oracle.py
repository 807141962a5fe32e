"""Exact vector chromatic number for small graphs (test oracle only).

chi_v(G) = 1 - 1/t* where t* is the least achievable maximum edge entry of
a unit-diagonal PSD matrix.  t* is approached from above by minimizing a
log-sum-exp smoothing of the maximum edge inner product over full-rank
(n x n) factors with normalized rows, and bounded from below by a dual
certificate built from the softmax weights of the final iterate.  The
primal factor proves feasibility; the dual bound proves infeasibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize, nnls
from scipy.special import logsumexp, softmax

from .errors import DomainError, SizeError
from .rng import STREAM_ORACLE, make_rng

MAX_VERTICES = 64
KAPPA_LO = 2.0 + 1e-6


@dataclass(frozen=True, eq=False)
class _Solve:
    U: np.ndarray  # row-normalized factor
    t_upper: float  # max edge entry of U U^T
    t_lower: float  # dual lower bound on t*
    iterations: int


@dataclass(frozen=True, eq=False)
class Feasibility:
    status: str  # "feasible" | "infeasible" | "inconclusive"
    kappa: float
    gram: np.ndarray | None
    margin: float  # best achieved violation: max edge entry minus -1/(kappa-1)
    dual_margin: float  # dual lower bound minus -1/(kappa-1); > 0 proves infeasibility
    iterations: int


@dataclass(frozen=True, eq=False)
class OracleResult:
    chi_v: float
    bracket: tuple
    gram: np.ndarray | None
    dual_evidence: float
    iterations: int
    status: str  # "exact" | "widened"
    t_upper: float = float("nan")
    t_lower: float = float("nan")


def _objective(x, n, e, tau):
    U = x.reshape(n, n)
    r = np.linalg.norm(U, axis=1)
    N = U / r[:, None]
    g = np.einsum("ij,ij->i", N[e[:, 0]], N[e[:, 1]])
    f = tau * logsumexp(g / tau)
    w = softmax(g / tau)
    Wm = sp.coo_array((np.r_[w, w], (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])), shape=(n, n)).tocsr()
    h = np.bincount(e[:, 0], weights=w * g, minlength=n) + np.bincount(e[:, 1], weights=w * g, minlength=n)
    grad = (Wm @ N - h[:, None] * N) / r[:, None]
    return f, grad.ravel()


def _dual_bound(n, e, P, y):
    """Lower bound -sum(mu) on t* from edge weights y >= 0 summing to one."""
    M = np.zeros((n, n))
    M[e[:, 0], e[:, 1]] = y / 2
    M[e[:, 1], e[:, 0]] = y / 2
    mu = -np.einsum("ij,ji->i", M, P)
    lam = np.linalg.eigvalsh(M + np.diag(mu))[0]
    mu = mu - min(lam, 0.0) + 1e-12 * n
    return -float(mu.sum())


def _kkt_weights(U, e, g, t_up, window=1e-3):
    """Edge multipliers fitted to the stationarity condition (M_y + diag(mu)) U = 0.

    mu is eliminated row by row, leaving a nonnegative least-squares problem
    in y over the nearly active edges, with sum(y) = 1 imposed by a heavy row.
    """
    act = np.flatnonzero(g >= t_up - window)
    n, dim = U.shape
    A = np.zeros((n * dim + 1, len(act)))
    for col, k in enumerate(act):
        i, j = e[k]
        A[i * dim:(i + 1) * dim, col] = 0.5 * (U[j] - g[k] * U[i])
        A[j * dim:(j + 1) * dim, col] = 0.5 * (U[i] - g[k] * U[j])
    big = 1e3
    A[-1] = big
    b = np.zeros(n * dim + 1)
    b[-1] = big
    ya, _ = nnls(A, b, maxiter=50 * len(act))
    y = np.zeros(len(g))
    y[act] = ya / ya.sum()
    return y


def _solve(G, seed=0, restarts=3, tau0=0.05, tau_min=1e-7, max_stage_iter=2000):
    n = G.n
    e = G.edges()
    best = None
    iters = 0
    for k in range(restarts):
        rng = make_rng(seed, STREAM_ORACLE, k)
        x = rng.standard_normal(n * n)
        tau = tau0
        while tau >= tau_min:
            res = minimize(_objective, x, args=(n, e, tau), jac=True, method="L-BFGS-B",
                           options={"maxiter": max_stage_iter, "ftol": 1e-15, "gtol": 1e-12})
            iters += res.nit
            U = res.x.reshape(n, n)
            x = (U / np.linalg.norm(U, axis=1)[:, None]).ravel()
            tau *= 0.5
        U = x.reshape(n, n)
        P = U @ U.T
        g = P[e[:, 0], e[:, 1]]
        t_up = float(g.max())
        t_lo = max(_dual_bound(n, e, P, softmax(g / (2 * tau))),
                   _dual_bound(n, e, P, _kkt_weights(U, e, g, t_up)))
        if best is None or t_up < best.t_upper:
            best = _Solve(U, t_up, max(t_lo, best.t_lower if best else -math.inf), iters)
        elif t_lo > best.t_lower:
            best = _Solve(best.U, best.t_upper, t_lo, iters)
    return _Solve(best.U, best.t_upper, best.t_lower, iters)


_CACHE = {}


def _cached_solve(G, seed):
    # the optimum does not depend on kappa, so one solve serves every bisection pivot
    key = (G.digest(), seed)
    if key not in _CACHE:
        _CACHE[key] = _solve(G, seed)
    return _CACHE[key]


def _guard(G):
    if G.n > MAX_VERTICES:
        raise SizeError(f"oracle limited to n <= {MAX_VERTICES}, got {G.n}")


def feasibility(G, kappa, tol=1e-9, seed=0):
    """Is there a unit-diagonal PSD matrix with every edge entry <= -1/(kappa - 1)?"""
    _guard(G)
    if not kappa > 2:
        raise DomainError(f"kappa must exceed 2, got {kappa}")
    c = -1.0 / (kappa - 1)
    if G.edge_count == 0:
        return Feasibility("feasible", kappa, np.eye(G.n), -math.inf, -math.inf, 0)
    s = _cached_solve(G, seed)
    margin = s.t_upper - c
    dual = s.t_lower - c
    # the dual bound is a proof on its own; a large primal margin alone is not
    if margin <= tol:
        status = "feasible"
    elif dual > 0:
        status = "infeasible"
    else:
        status = "inconclusive"
    gram = s.U @ s.U.T if status == "feasible" else None
    return Feasibility(status, float(kappa), gram, float(margin), float(dual), s.iterations)


def _kappa_of(t):
    return 1.0 - 1.0 / t if t < 0 else math.inf


def chi_v_exact(G, tol=1e-5, feas_tol=1e-9, seed=0):
    """Bisection on kappa over [2 + 1e-6, n]; an edgeless graph gets 1.

    An inconclusive pivot ends the bisection; the bracket is then clipped to
    the interval certified by the primal and dual bounds, and the status is
    ``"widened"`` if that is still wider than ``tol``.
    """
    _guard(G)
    if G.edge_count == 0:
        return OracleResult(1.0, (1.0, 1.0), np.eye(G.n), math.inf, 0, "exact")
    lo, hi = KAPPA_LO, float(max(G.n, 3))
    first = feasibility(G, lo, feas_tol, seed)
    s = _cached_solve(G, seed)
    if first.status == "feasible":
        return OracleResult(2.0, (2.0, lo), first.gram, math.inf, first.iterations, "exact", s.t_upper, s.t_lower)
    top = feasibility(G, hi, feas_tol, seed)
    if top.status != "feasible":
        raise DomainError(f"oracle could not certify feasibility at kappa = n = {hi}")
    gram, evidence = top.gram, first.dual_margin
    status = "exact"
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f = feasibility(G, mid, feas_tol, seed)
        if f.status == "feasible":
            hi, gram = mid, f.gram
        elif f.status == "infeasible":
            lo, evidence = mid, f.dual_margin
        else:
            lo = max(lo, _kappa_of(s.t_lower))
            hi = min(hi, _kappa_of(s.t_upper))
            gram = s.U @ s.U.T
            if hi - lo > tol:
                status = "widened"
            break
    return OracleResult(0.5 * (lo + hi), (lo, hi), gram, evidence, s.iterations, status, s.t_upper, s.t_lower)
