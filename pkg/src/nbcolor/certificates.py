"""Lower-bound certificates for the vector chromatic number.

If L(r) is PSD for some r < 0 and W is PSD with unit trace and nonnegative
entries on edges, then

    chi_v(G) >= -r <W, A> / (r^2 + <W, D - I>) + 1.

With W = J/n this is |r d_avg| / (r^2 + d_avg - 1) + 1.  A certificate stores
r, W and the claimed value; checking it costs one PSD test plus arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .deformed import DeformedLaplacian, real_root_scan, smallest_real_eig_B
from .errors import ConstraintViolation, InvalidPremiseError, ParameterError, WrongGraphError
from .rng import RNG_ALGORITHM

SCHEMA_VERSION = 1
UNIFORM = "uniform_J_over_n"
ARITH_TOL = 1e-12


def _bound(r, wa, wd):
    return -r * wa / (r * r + wd) + 1.0


def _check_r(L, r, tol=None):
    if not r < 0:
        raise InvalidPremiseError(f"r must be negative, got {r}")
    if not L.is_psd(r, tol):
        lam = L.lambda_min(r)
        raise InvalidPremiseError(f"L({r}) is not PSD (lambda_min = {lam:.3e}); r is not certified", lam)


def lower_bound(G, r, tol=None):
    """|r d_avg| / (r^2 + d_avg - 1) + 1, after checking that L(r) is PSD."""
    d = 2 * G.edge_count / G.n
    if d <= 1:
        raise ParameterError(f"average degree {d} <= 1; the bound is degenerate")
    _check_r(DeformedLaplacian(G), r, tol)
    return abs(r * d) / (r * r + d - 1) + 1


def optimal_r(G, r_star):
    """Best admissible r: the unconstrained maximizer -sqrt(d_avg - 1), capped at r_star."""
    d = 2 * G.edge_count / G.n
    if d <= 1:
        raise ParameterError(f"average degree {d} <= 1; the bound is degenerate")
    return min(r_star, -math.sqrt(d - 1))


def weight_pairings(G, W):
    """(<W, A>, <W, D - I>) for a dense symmetric W."""
    e = G.edges()
    wa = 2.0 * float(W[e[:, 0], e[:, 1]].sum()) if len(e) else 0.0
    wd = float(np.dot(np.diag(W), G.degrees - 1.0))
    return wa, wd


def check_weighting(G, W, trace_tol=1e-10, psd_shift=1e-10):
    W = np.asarray(W, dtype=float)
    if W.shape != (G.n, G.n):
        raise ConstraintViolation(f"W must be {G.n}x{G.n}", float("nan"))
    asym = float(np.max(np.abs(W - W.T))) if G.n else 0.0
    if asym > 1e-12 * max(1.0, float(np.max(np.abs(W)))):
        raise ConstraintViolation("W symmetric", asym)
    tr = float(np.trace(W))
    if abs(tr - 1.0) > trace_tol:
        raise ConstraintViolation("Tr W = 1", abs(tr - 1.0))
    e = G.edges()
    if len(e):
        worst = float(W[e[:, 0], e[:, 1]].min())
        if worst < 0:
            raise ConstraintViolation("W_ij >= 0 on edges", -worst)
    try:
        np.linalg.cholesky(W + psd_shift * max(1.0, float(np.max(np.abs(W)))) * np.eye(G.n))
    except np.linalg.LinAlgError:
        raise ConstraintViolation("W PSD", -float(np.linalg.eigvalsh(W)[0])) from None
    return W


def weighted_lower_bound(G, W, r, optimize_r=True, tol=None):
    """The weighted bound for a user-supplied W.

    With ``optimize_r`` the argument ``r`` is read as r_star and the bound is
    evaluated at min(r_star, -sqrt(<W, D - I>)), the maximizer over r <= r_star.
    Returns ``(bound, r_used)``.
    """
    W = check_weighting(G, W)
    wa, wd = weight_pairings(G, W)
    if optimize_r and wd > 0:
        r = min(r, -math.sqrt(wd))
    _check_r(DeformedLaplacian(G), r, tol)
    return _bound(r, wa, wd), r


@dataclass
class LowerBoundCertificate:
    r: float
    weighting: object  # UNIFORM or {"kind": "explicit", "matrix": [[...]]}
    claimed_bound: float
    graph_digest: str
    tolerances: dict
    generator_metadata: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported certificate schema {data.get('schema_version')}")
        return cls(**data)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())


def _weight_matrix(G, weighting):
    if weighting == UNIFORM:
        return None
    if isinstance(weighting, dict) and weighting.get("kind") == "explicit":
        return np.asarray(weighting["matrix"], dtype=float)
    raise ValueError(f"unknown weighting descriptor {weighting!r}")


def _recompute(G, r, weighting):
    W = _weight_matrix(G, weighting)
    if W is None:
        d = 2 * G.edge_count / G.n
        return abs(r * d) / (r * r + d - 1) + 1
    wa, wd = weight_pairings(G, W)
    return _bound(r, wa, wd)


def emit_certificate(G, r=None, weighting=UNIFORM, tol=None, location=None):
    """Build a certificate; ``r=None`` runs the smallest-real-eigenvalue search and picks r optimally."""
    L = DeformedLaplacian(G)
    meta = {"package": f"nbcolor {__version__}", "rng": RNG_ALGORITHM}
    W = _weight_matrix(G, weighting)
    if r is None:
        loc = location if location is not None else smallest_real_eig_B(G, family=L)
        meta.update(r_star=loc.r_star, r_star_method=loc.method, grid_step=loc.grid_used)
        if W is None:
            r = optimal_r(G, loc.r_star)
        else:
            wd = weight_pairings(G, check_weighting(G, W))[1]
            r = min(loc.r_star, -math.sqrt(wd)) if wd > 0 else loc.r_star
        meta["boundary_case"] = r == loc.r_star
    if W is not None:
        check_weighting(G, W)
        if isinstance(weighting, dict):
            weighting = {"kind": "explicit", "matrix": W.tolist()}
    psd_tol = L.default_tol(r) if tol is None else tol
    _check_r(L, r, psd_tol)
    return LowerBoundCertificate(
        r=float(r),
        weighting=weighting,
        claimed_bound=float(_recompute(G, r, weighting)),
        graph_digest=G.digest(),
        tolerances={"psd_shift": float(psd_tol), "arithmetic_rel": ARITH_TOL},
        generator_metadata=meta,
    )


@dataclass
class Verification:
    ok: bool
    reasons: list
    lambda_min: float | None = None
    recomputed_bound: float | None = None

    def __bool__(self):
        return self.ok


def verify_certificate(G, cert):
    """Re-run the PSD test, the W constraints and the arithmetic; no trust in the emitter."""
    if cert.graph_digest != G.digest():
        raise WrongGraphError("certificate digest does not match the graph")
    reasons = []
    lam = None
    r = float(cert.r)
    if not r < 0:
        reasons.append(f"r = {r} is not negative")
    else:
        L = DeformedLaplacian(G)
        if not L.is_psd(r, cert.tolerances["psd_shift"]):
            lam = L.lambda_min(r)
            reasons.append(f"L(r) not PSD: lambda_min = {lam:.6e}")
    weights_ok = True
    try:
        W = _weight_matrix(G, cert.weighting)
        if W is not None:
            check_weighting(G, W)
    except (ConstraintViolation, ValueError) as exc:
        reasons.append(str(exc))
        weights_ok = False
    recomputed = None
    if weights_ok:
        recomputed = _recompute(G, r, cert.weighting)
        rel = abs(recomputed - cert.claimed_bound) / max(1.0, abs(cert.claimed_bound))
        if rel > cert.tolerances.get("arithmetic_rel", ARITH_TOL):
            reasons.append(f"claimed bound {cert.claimed_bound} != recomputed {recomputed}")
    return Verification(not reasons, reasons, lam, recomputed)


@dataclass(frozen=True)
class RamanujanCheck:
    holds: bool
    slack: float
    premise_established: bool
    offending_roots: tuple
    suspected_roots: tuple


def ramanujan_inequality_check(G, P, rho, grid_step=None, root_tol=1e-6):
    """<A, P> >= -2 Tr P sqrt(<D - I, P>), with its spectral premise checked by a root scan.

    The premise (no real eigenvalue of B other than +-1 and rho) is checked
    on det L(z) over [-(1 + max degree), 1 + max degree]; tangential roots are
    reported separately because the scan cannot rule them out.
    """
    P = np.asarray(P, dtype=float)
    wa, wd = weight_pairings(G, P)
    slack = wa + 2 * float(np.trace(P)) * math.sqrt(max(wd, 0.0))
    span = 1.0 + float(G.degrees.max())
    roots = real_root_scan(G, -span, span, grid_step=grid_step)
    allowed = (1.0, -1.0, float(rho))
    bad = tuple(r.z for r in roots if r.kind != "suspected" and min(abs(r.z - a) for a in allowed) > root_tol)
    sus = tuple(r.z for r in roots if r.kind == "suspected" and min(abs(r.z - a) for a in allowed) > root_tol)
    return RamanujanCheck(slack >= -1e-12, slack, not bad, bad, sus)
