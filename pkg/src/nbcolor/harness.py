"""Erdos-Renyi sweep: sample, reduce to the 2-core, certify, tabulate.

Each row is a pure function of (n, d, seed) and the package version, apart
from ``runtime_ms``.  Samples that fail a structural precondition still
produce a row, with ``skip_reason`` filled in.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

from .certificates import emit_certificate
from .deformed import DeformedLaplacian, smallest_real_eig_B
from .errors import NBColorError
from .graph import classify, connected_components, sample_er, two_core
from .nonbacktracking import perron

COLUMNS = ("n", "d", "seed", "rho_hat", "r_star", "lower_bound", "theory_lower", "theory_upper",
           "ks_threshold", "runtime_ms", "skip_reason")


def theory_lower(d):
    """d^1.5 / (2d - 1) + 1; NaN for d <= 1/2, where the expression has no meaning."""
    if d <= 0.5:
        return math.nan
    return d**1.5 / (2 * d - 1) + 1


def theory_upper(d):
    return max((d + 1) / (2 * math.sqrt(d)) + 2, 4.0)


def d_first(k):
    """First-moment colorability threshold 2k log k - log k - 1 (reported, never used)."""
    return 2 * k * math.log(k) - math.log(k) - 1


def d_second(k):
    """Second-moment threshold 2k log k - log k - 2 log 2 (reported, never used)."""
    return 2 * k * math.log(k) - math.log(k) - 2 * math.log(2)


def ks_threshold_for(bound):
    """(k - 1)^2 for k = ceil(bound) - 1, the largest color count the bound rules out."""
    k = max(math.ceil(bound - 1e-12) - 1, 1)
    return float((k - 1) ** 2)


@dataclass
class ExperimentRow:
    n: int
    d: float
    seed: int
    rho_hat: float | None
    r_star: float | None
    lower_bound: float | None
    theory_lower: float
    theory_upper: float
    ks_threshold: float | None
    runtime_ms: float
    skip_reason: str = ""

    def as_csv_values(self):
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append("" if v is None else repr(v) if isinstance(v, float) else str(v))
        return out


def core_component(G):
    """Largest connected component of the 2-core, as a standalone graph."""
    core, _ = two_core(G)
    if core.n == 0:
        return core
    comps = connected_components(core)
    return core if len(comps) == 1 else core.subgraph(comps[0])[0]


def run_row(n, d, seed):
    """One sweep row plus its certificate (``None`` for skipped samples)."""
    t0 = time.perf_counter()
    row = ExperimentRow(n, float(d), int(seed), None, None, None, theory_lower(d), theory_upper(d), None, 0.0)
    cert = None
    try:
        C = core_component(sample_er(n, d, seed))
        report = classify(C)
        if not report.eligible:
            row.skip_reason = "; ".join(report.reasons)
        else:
            row.rho_hat = perron(C, check=False).rho
            L = DeformedLaplacian(C)
            loc = smallest_real_eig_B(C, check=False, family=L)
            row.r_star = loc.r_star
            cert = emit_certificate(C, location=loc)
            row.lower_bound = cert.claimed_bound
            row.ks_threshold = ks_threshold_for(cert.claimed_bound)
    except NBColorError as exc:
        row.skip_reason = f"{type(exc).__name__}: {exc}"
        cert = None
    row.runtime_ms = round((time.perf_counter() - t0) * 1000, 3)
    return row, cert


def _job(args):
    return run_row(*args)


def er_sweep(n, ds, seeds, threads=1):
    """Rows for every (d, seed) pair, ordered by (d, seed) whatever the worker count."""
    jobs = [(n, d, s) for d in ds for s in seeds]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_job, jobs))
    else:
        results = [_job(j) for j in jobs]
    order = sorted(range(len(jobs)), key=lambda k: (jobs[k][1], jobs[k][2]))
    return [results[k] for k in order]


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.as_csv_values())
    return buf.getvalue()


def summarize(rows, slack=0.5):
    """Per d: fraction of rows with r_star >= -(sqrt(d) + slack), plus reference constants."""
    out = {}
    for d in sorted({r.d for r in rows}):
        sub = [r for r in rows if r.d == d]
        good = sum(1 for r in sub if r.r_star is not None and r.r_star >= -(math.sqrt(d) + slack))
        bounds = [r.lower_bound for r in sub if r.lower_bound is not None]
        k = 3
        out[d] = {
            "rows": len(sub),
            "skipped": sum(1 for r in sub if r.skip_reason),
            "r_star_within": good,
            "fraction_r_star_within": good / len(sub) if sub else 0.0,
            "mean_lower_bound": sum(bounds) / len(bounds) if bounds else None,
            "theory_lower": theory_lower(d),
            "theory_upper": theory_upper(d),
            "d_first_k3": d_first(k),
            "d_second_k3": d_second(k),
        }
    return out


def row_dict(row):
    return asdict(row)
