"""The deformed Laplacian L(z) = z^2 I - z A + D - I and its real-axis analysis.

Dense eigenvalues (LAPACK ``syevd``) are used up to ``DENSE_LIMIT`` vertices,
ARPACK Lanczos (``eigsh``) above that.  A root of det L(z) on the real line is
a real eigenvalue of B not accounted for by the (z^2-1) factor of Ihara-Bass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import ConvergenceError, EligibilityError
from .graph import classify

DENSE_LIMIT = 512


class DeformedLaplacian:
    """L(z) for a fixed graph; A and D are assembled once and reused across z."""

    def __init__(self, G):
        self.graph = G
        self.n = G.n
        self.A = G.adjacency_matrix()
        self.deg = G.degrees.astype(float)
        self.max_degree = int(G.degrees.max()) if G.n else 0
        self._dense_A = self.A.toarray() if G.n <= DENSE_LIMIT else None
        self._v0 = np.random.default_rng(0).uniform(0.5, 1.5, size=G.n)
        self._warm = None

    def scale(self, z):
        return 1.0 + z * z + self.max_degree

    def default_tol(self, z):
        return 1e-9 * self.scale(z)

    def matvec(self, z, v):
        return (z * z - 1) * v - z * (self.A @ v) + self.deg * v

    def sparse(self, z):
        return sp.diags((z * z - 1) + self.deg) - z * self.A

    def dense(self, z):
        A = self._dense_A if self._dense_A is not None else self.A.toarray()
        return np.diag((z * z - 1) + self.deg) - z * A

    def eigenvalues(self, z):
        return np.linalg.eigvalsh(self.dense(z))

    def lambda_min(self, z, mode="auto"):
        if mode == "auto":
            mode = "dense" if self.n <= DENSE_LIMIT else "lanczos"
        if mode == "dense" or self.n < 3:
            return float(self.eigenvalues(z)[0])
        if mode != "lanczos":
            raise ValueError(f"unknown mode {mode!r}")
        v0 = self._v0 if self._warm is None else self._warm + 1e-3 * self._v0
        try:
            w, v = eigsh(self.sparse(z).tocsr(), k=1, which="SA", tol=1e-10, v0=v0,
                         ncv=min(self.n, 40), maxiter=20 * self.n)
        except ArpackNoConvergence:
            if self.n <= DENSE_LIMIT:
                return float(self.eigenvalues(z)[0])
            raise ConvergenceError(f"Lanczos did not converge for L({z})") from None
        self._warm = v[:, 0]
        return float(w[0])

    def is_psd(self, z, tol=None):
        tol = self.default_tol(z) if tol is None else tol
        if self.n <= DENSE_LIMIT:
            try:
                np.linalg.cholesky(self.dense(z) + tol * np.eye(self.n))
                return True
            except np.linalg.LinAlgError:
                return False
        return self.lambda_min(z) >= -tol

    def negative_count(self, z, tol=None):
        tol = self.default_tol(z) if tol is None else tol
        return int(np.sum(self.eigenvalues(z) < -tol))


def lambda_min(G, z, mode="auto"):
    return DeformedLaplacian(G).lambda_min(z, mode)


def is_psd(G, z, tol=None):
    """PSD test of L(z) with shift ``tol`` (default 1e-9 (1 + z^2 + max degree))."""
    return DeformedLaplacian(G).is_psd(z, tol)


@dataclass(frozen=True)
class RealRoot:
    z: float
    kind: str  # "crossing", "suspected", or "exact" (z = 0 with degree-one vertices)
    multiplicity: int
    lam: float  # smallest |eigenvalue| (dense) or lambda_min (sparse) at z


@dataclass(frozen=True)
class RealEigLocation:
    r_star: float
    method: str  # "baseline_minus_one" | "bisection_crossing" | "scan_above_minus_one"
    bracket: float
    grid_used: float
    lam_min_at_r: float
    suspected: tuple = field(default=())

    def as_dict(self):
        return {
            "r_star": self.r_star,
            "method": self.method,
            "bracket": self.bracket,
            "grid_used": self.grid_used,
            "lam_min_at_r": self.lam_min_at_r,
            "suspected": [r.z for r in self.suspected],
        }


def _grid(a, b, step):
    k = max(1, int(np.ceil((b - a) / step - 1e-12)))
    return np.linspace(a, b, k + 1)


def _bisect(pred, lo, hi, tol):
    """Shrink [lo, hi] with pred(lo) True, pred(hi) False until hi - lo <= tol."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def smallest_real_eig_B(G, tol=1e-10, grid_step=None, check=True, family=None):
    """Locate the smallest real eigenvalue of B through the PSD-ness of L(z).

    Scans lambda_min(L(z)) upward from z_lo = -(1 + max degree), where L is
    diagonally dominant, to -1 and bisects the first sign change.  Without a
    crossing the answer is the eigenvalue -1 that B always carries when
    |E| > |V|.  Near-zero local minima without a sign change are refined and
    reported as ``suspected`` tangential roots.
    """
    if check:
        report = classify(G)
        if not report.eligible:
            raise EligibilityError("smallest_real_eig_B needs an eligible graph: " + "; ".join(report.reasons))
    L = DeformedLaplacian(G) if family is None else family
    dmax = L.max_degree
    step = 0.01 * (1 + dmax) if grid_step is None else grid_step
    z_lo = -(1.0 + dmax)

    def negative(z):
        # dense eigenvalues are accurate to roundoff, so refine against a near-zero threshold
        thresh = 64 * np.finfo(float).eps * L.scale(z) if L.n <= DENSE_LIMIT else L.default_tol(z)
        return L.lambda_min(z) < -thresh

    zs = _grid(z_lo, -1.0, step)
    lams = []
    suspected = []
    for k, z in enumerate(zs):
        lam = L.lambda_min(z)
        lams.append(lam)
        if k == 0 and lam <= 0:
            raise ConvergenceError(f"L({z_lo}) is not positive definite; diagonal dominance violated")
        # a local minimum at the previous grid point may hide two crossings inside one cell
        if k >= 2 and lams[-2] < lams[-3] and lams[-2] <= lam and lams[-2] < 0.05 * L.scale(zs[k - 1]):
            res = minimize_scalar(L.lambda_min, bounds=(zs[k - 2], z), method="bounded",
                                  options={"xatol": tol})
            if res.fun < -L.default_tol(res.x):
                lo, hi = _bisect(lambda t: not negative(t), float(zs[k - 2]), float(res.x), tol)
                return RealEigLocation(float(lo), "bisection_crossing", float(hi - lo), step,
                                       L.lambda_min(lo), tuple(suspected))
            if abs(res.fun) <= 10 * L.default_tol(res.x):
                suspected.append(RealRoot(float(res.x), "suspected", 2, float(res.fun)))
        if lam < -L.default_tol(z):
            lo, hi = _bisect(lambda t: not negative(t), float(zs[k - 1]), float(z), tol)
            return RealEigLocation(float(lo), "bisection_crossing", float(hi - lo), step,
                                   L.lambda_min(lo), tuple(suspected))

    if G.edge_count > G.n:
        return RealEigLocation(-1.0, "baseline_minus_one", 0.0, step, lams[-1], tuple(suspected))

    # |E| == |V|: no -1 eigenvalue is guaranteed; continue towards +1
    roots = real_root_scan(G, -1.0, 1.0 - 1e-9, grid_step=step, family=L)
    if roots:
        r = roots[0]
        return RealEigLocation(r.z, "scan_above_minus_one", tol, step, r.lam, tuple(suspected))
    raise EligibilityError("no real eigenvalue of B below rho located on (-inf, 1)")


def real_root_scan(G, a, b, grid_step=None, tol=1e-10, family=None):
    """Real roots of det L(z) on [a, b].

    Dense path: counts negative eigenvalues on a grid, so crossings of any
    eigenvalue (not only the smallest) are found and bisected; local minima of
    the smallest |eigenvalue| that do not change the count are refined and
    returned as ``suspected`` even-multiplicity roots.  Sparse path: sign
    changes of lambda_min only.  z = 0 is decided exactly from the degrees.
    """
    L = DeformedLaplacian(G) if family is None else family
    step = 0.01 * (1 + L.max_degree) if grid_step is None else grid_step
    zs = _grid(a, b, step)
    dense = L.n <= DENSE_LIMIT

    if dense:
        def count(z, strict=False):
            return L.negative_count(z, 64 * np.finfo(float).eps * L.scale(z) if strict else None)

        def closeness(z):
            return float(np.min(np.abs(L.eigenvalues(z))))
    else:
        def count(z, strict=False):
            return int(L.lambda_min(z) < -L.default_tol(z))

        def closeness(z):
            return abs(L.lambda_min(z))

    counts = [count(z) for z in zs]
    close = [closeness(z) for z in zs]
    roots = []

    def find(lo, hi, c_lo, c_hi):
        # leftmost count change in (lo, hi]; more changes remain while the count differs from c_hi
        while True:
            c_lo = count(lo, strict=True)
            left, right = _bisect(lambda t, base=c_lo: count(t, strict=True) == base, lo, hi, tol)
            c_after = count(right, strict=True)
            x = 0.5 * (left + right)
            roots.append(RealRoot(float(x), "crossing", abs(c_after - c_lo), closeness(x)))
            if c_after == count(hi, strict=True) or right >= hi:
                return
            lo = right

    for k in range(len(zs) - 1):
        if counts[k] != counts[k + 1]:
            find(zs[k], zs[k + 1], counts[k], counts[k + 1])

    for k in range(len(zs)):
        left = close[k - 1] if k > 0 else np.inf
        right = close[k + 1] if k + 1 < len(zs) else np.inf
        if close[k] <= left and close[k] <= right and close[k] < 0.05 * L.scale(zs[k]):
            lo, hi = zs[max(k - 1, 0)], zs[min(k + 1, len(zs) - 1)]
            res = minimize_scalar(closeness, bounds=(lo, hi), method="bounded", options={"xatol": tol})
            x, val = float(res.x), float(res.fun)
            if val <= 1e-7 * L.scale(x) and not any(abs(r.z - x) < 1e-6 for r in roots):
                roots.append(RealRoot(x, "suspected", 2, val))
    # det L(0) = prod(d_i - 1) vanishes exactly when some vertex has degree one
    leaves = int(np.sum(L.deg == 1))
    if leaves and a <= 0.0 <= b:
        roots = [r for r in roots if abs(r.z) > (step if r.kind == "suspected" else 1e-6)]
        roots.append(RealRoot(0.0, "exact", leaves, closeness(0.0)))
    roots.sort(key=lambda r: r.z)
    return roots
