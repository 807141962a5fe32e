"""Hyperplane rounding of vector colorings and the walk-based MaxCut bound."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SizeError
from .rng import RNG_ALGORITHM, STREAM_GW, make_rng

DMS_CONSTANT = 0.7632


@dataclass(frozen=True, eq=False)
class CutResult:
    partition: np.ndarray  # +1 / -1 per vertex, the best partition seen
    cut_edges: int
    trials: int
    mean_cut: float
    best_cut: int
    seed: int
    std_cut: float
    ties_resampled: int = 0

    @property
    def std_error(self):
        return self.std_cut / math.sqrt(self.trials)

    def to_dict(self):
        return {
            "partition": "".join("1" if s > 0 else "0" for s in self.partition),
            "cut_edges": self.cut_edges,
            "trials": self.trials,
            "mean_cut": self.mean_cut,
            "best_cut": self.best_cut,
            "seed": self.seed,
            "std_cut": self.std_cut,
            "ties_resampled": self.ties_resampled,
            "rng": RNG_ALGORITHM,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        part = np.array([1 if c == "1" else -1 for c in d["partition"]], dtype=np.int8)
        return cls(part, d["cut_edges"], d["trials"], d["mean_cut"], d["best_cut"], d["seed"],
                   d.get("std_cut", float("nan")), d.get("ties_resampled", 0))


def _cuts(signs, e):
    return np.count_nonzero(signs[e[:, 0]] != signs[e[:, 1]], axis=0)


def gw_round(G, vc, trials=10_000, seed=0, batch=1024):
    """Split vertices by the sign of <v_i, g> for standard Gaussian g; best and mean over trials.

    Batch ``b`` draws from its own stream keyed by (seed, b), so any batch can
    be recomputed on its own.  A trial with an exactly zero projection is
    redrawn.
    """
    if trials < 1:
        raise ParameterError("trials must be positive")
    V = vc.vectors
    e = G.edges()
    total = 0.0
    total_sq = 0.0
    best, best_part = -1, None
    ties = 0
    done = 0
    b = 0
    while done < trials:
        k = min(batch, trials - done)
        rng = make_rng(seed, STREAM_GW, b)
        proj = np.asarray(V @ rng.standard_normal((V.shape[1], k)))
        zero = np.any(proj == 0, axis=0)
        while zero.any():
            ties += int(zero.sum())
            proj[:, zero] = np.asarray(V @ rng.standard_normal((V.shape[1], int(zero.sum()))))
            zero = np.any(proj == 0, axis=0)
        signs = np.where(proj > 0, 1, -1).astype(np.int8)
        cuts = _cuts(signs, e) if len(e) else np.zeros(k, dtype=np.int64)
        total += float(cuts.sum())
        total_sq += float(np.dot(cuts, cuts))
        t = int(np.argmax(cuts))
        if cuts[t] > best:
            best, best_part = int(cuts[t]), signs[:, t].copy()
        done += k
        b += 1
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
    return CutResult(best_part, cut_value(G, best_part), trials, mean, best, int(seed), math.sqrt(var), ties)


def analytic_expected_cut(vc):
    """Sum over edges of arccos(<v_i, v_j>) / pi, the exact mean of ``gw_round``."""
    return float(np.sum(np.arccos(np.clip(vc.edge_gram, -1.0, 1.0))) / math.pi)


@dataclass(frozen=True)
class CutBound:
    bound: float
    er_form: float
    dms_reference: float


def expected_cut_lb(G, m, rho):
    """|E| (1/2 + 2 (1 - 1/m) sqrt(rho) / (pi (rho + 1))), with two reference values for context.

    ``er_form`` plugs the average degree d into the edge bound
    -2 sqrt(d) / (sqrt(d) + 1)^2; ``dms_reference`` is |E| (1/2 + 0.7632 / sqrt(d)).
    """
    if m < 2:
        raise ParameterError(f"m = {m} < 2 gives a vacuous bound")
    E = G.edge_count
    bound = E * (0.5 + 2 * (1 - 1 / m) * math.sqrt(rho) / (math.pi * (rho + 1)))
    d = 2 * E / G.n
    sd = math.sqrt(d)
    er = E * (0.5 + 2 * sd / (sd + 1) ** 2 / math.pi)
    return CutBound(bound, er, E * (0.5 + DMS_CONSTANT / sd))


def cut_value(G, partition):
    """Number of edges whose endpoints get different signs; ``partition`` is a sequence or mapping."""
    if isinstance(partition, dict):
        missing = [v for v in range(G.n) if v not in partition]
        if missing:
            raise ValueError(f"partition misses vertices {missing[:10]}")
        signs = np.array([partition[v] for v in range(G.n)])
    else:
        signs = np.asarray(partition)
        if signs.shape != (G.n,):
            raise ValueError(f"partition must assign all {G.n} vertices, got shape {signs.shape}")
    if not np.all(np.isin(signs, (-1, 1))):
        raise ValueError("partition entries must be +1 or -1")
    e = G.edges()
    return int(np.count_nonzero(signs[e[:, 0]] != signs[e[:, 1]])) if len(e) else 0


def exhaustive_max_cut(G, limit=24):
    """Exact maximum cut by enumerating all 2^(n-1) partitions (vertex 0 fixed)."""
    if G.n > limit:
        raise SizeError(f"exhaustive search limited to n <= {limit}")
    if G.n <= 1:
        return 0, np.ones(G.n, dtype=np.int8)
    e = G.edges()
    best, arg = -1, 0
    chunk = 1 << 16
    total = 1 << (G.n - 1)
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64) << 1
        bits = (masks[:, None] >> np.arange(G.n)) & 1
        cuts = np.count_nonzero(bits[:, e[:, 0]] != bits[:, e[:, 1]], axis=1)
        k = int(np.argmax(cuts))
        if cuts[k] > best:
            best, arg = int(cuts[k]), int(masks[k])
    part = np.where((arg >> np.arange(G.n)) & 1, -1, 1).astype(np.int8)
    return best, part
