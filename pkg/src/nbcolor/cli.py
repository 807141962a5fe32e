"""Command-line entry point: ``nbcolor <command> [options]``.

Exit codes: 0 success, 1 rejected verification or other error, 2 ineligible
input, 3 numerical non-convergence, 4 parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import ConvergenceError, EligibilityError, NBColorError, ParseError

EXIT_OK, EXIT_FAIL, EXIT_INELIGIBLE, EXIT_CONVERGENCE, EXIT_PARSE = 0, 1, 2, 3, 4


def _emit(args, data, out=None):
    out = out or sys.stdout
    if args.format == "json":
        out.write(json.dumps(data, indent=2, default=_jsonable) + "\n")
    elif args.format == "csv":
        rows = data if isinstance(data, list) else [data]
        keys = list(rows[0].keys()) if rows else []
        w = csv.writer(out, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow([_jsonable(r[k]) if not isinstance(r[k], (str, int, float)) else r[k] for k in keys])
    else:
        for k, v in data.items():
            out.write(f"{k}: {v}\n")


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (set, frozenset, tuple)):
        return list(v)
    return str(v)


def _load(path):
    from .graph import read_graph

    return read_graph(path)


def cmd_analyze(args):
    from .deformed import smallest_real_eig_B
    from .graph import classify
    from .nonbacktracking import perron

    G = _load(args.graph)
    report = classify(G)
    data = {"n": G.n, "edges": G.edge_count, **report.as_dict(), "eligible": report.eligible}
    if report.two_core_size == 0:
        data["note"] = "empty 2-core: B is nilpotent, no spectral bound applies"
    if not report.eligible:
        data["reasons"] = "; ".join(report.reasons)
        _emit(args, data)
        return EXIT_INELIGIBLE
    data["rho"] = perron(G, check=False).rho
    loc = smallest_real_eig_B(G, check=False)
    data["r_star"] = loc.r_star
    data["r_star_method"] = loc.method
    if loc.suspected:
        data["suspected_tangential_roots"] = [r.z for r in loc.suspected]
    _emit(args, data)
    return EXIT_OK


def cmd_certify(args):
    from .certificates import emit_certificate

    G = _load(args.graph)
    r = None if args.r == "auto" else float(args.r)
    cert = emit_certificate(G, r=r, tol=args.tol)
    if args.emit:
        cert.save(args.emit)
    _emit(args, {"r": cert.r, "claimed_bound": cert.claimed_bound, "graph_digest": cert.graph_digest,
                 "certificate": args.emit or "(not written)", **{f"meta_{k}": v for k, v in cert.generator_metadata.items()}})
    return EXIT_OK


def cmd_verify(args):
    G = _load(args.graph)
    if args.cert:
        from .certificates import LowerBoundCertificate, verify_certificate

        res = verify_certificate(G, LowerBoundCertificate.load(args.cert))
        _emit(args, {"ok": res.ok, "recomputed_bound": res.recomputed_bound, "reasons": "; ".join(res.reasons)})
        return EXIT_OK if res.ok else EXIT_FAIL
    if not (args.vectors and args.kappa):
        raise SystemExit("verify needs --cert, or --vectors together with --kappa")
    from .coloring import VectorColoring, read_vectors, verify_coloring

    vc = VectorColoring.from_vectors(G, read_vectors(args.vectors))
    chk = verify_coloring(G, vc, float(args.kappa))
    _emit(args, {"ok": chk.ok, "kappa_claim": chk.kappa_claim, "worst_edge": chk.worst_edge,
                 "worst_value": chk.worst_value, "max_norm_error": chk.max_norm_error, "reasons": "; ".join(chk.reasons)})
    return EXIT_OK if chk.ok else EXIT_FAIL


def _vectors(G, m):
    from .coloring import build_vectors

    return build_vectors(G, None if m == "auto" else int(m))


def cmd_color(args):
    from .coloring import verify_coloring, write_gram, write_vectors

    G = _load(args.graph)
    vc = _vectors(G, args.m)
    chk = verify_coloring(G, vc, vc.kappa)
    data = {"m": vc.m, "rho": vc.rho, "kappa": vc.kappa, "guarantee": vc.guarantee, "verified": chk.ok,
            "max_edge_inner_product": float(vc.edge_gram.max()), "dimension": vc.dim}
    tag = f"nbcolor {__version__} digest {G.digest()}"
    if args.gram_out:
        write_gram(vc, args.gram_out, comment=tag)
        data["gram_file"] = args.gram_out
    if args.vectors_out:
        write_vectors(vc, args.vectors_out, comment=tag)
        data["vectors_file"] = args.vectors_out
    if args.maxcut:
        data.update(_maxcut(args, G, vc, args.maxcut))
    _emit(args, data)
    return EXIT_OK if chk.ok else EXIT_FAIL


def _maxcut(args, G, vc, trials):
    from .maxcut import analytic_expected_cut, expected_cut_lb, gw_round

    res = gw_round(G, vc, trials, seed=args.seed)
    if getattr(args, "cut_out", None):
        with open(args.cut_out, "w") as fh:
            fh.write(res.to_json() + "\n")
    b = expected_cut_lb(G, vc.m, vc.rho)
    return {"trials": res.trials, "mean_cut": res.mean_cut, "std_error": res.std_error, "best_cut": res.best_cut,
            "analytic_expected_cut": analytic_expected_cut(vc), "cut_lower_bound": b.bound,
            "dms_reference": b.dms_reference, "seed": res.seed}


def cmd_maxcut(args):
    G = _load(args.graph)
    vc = _vectors(G, args.m)
    _emit(args, {"edges": G.edge_count, **_maxcut(args, G, vc, args.trials)})
    return EXIT_OK


def cmd_oracle(args):
    from .oracle import chi_v_exact

    G = _load(args.graph)
    res = chi_v_exact(G, tol=args.tol or 1e-5, seed=args.seed)
    _emit(args, {"chi_v": res.chi_v, "bracket_lo": res.bracket[0], "bracket_hi": res.bracket[1],
                 "status": res.status, "dual_evidence": res.dual_evidence, "iterations": res.iterations})
    return EXIT_OK if res.status == "exact" else EXIT_CONVERGENCE


def cmd_ihara(args):
    from .nonbacktracking import ihara_bass_check, ihara_bass_exact
    from .rng import STREAM_PROBE, make_rng

    G = _load(args.graph)
    rng = make_rng(args.seed, STREAM_PROBE)
    zs = []
    while len(zs) < args.samples:
        z = rng.uniform(-5, 5)
        if min(abs(z - 1), abs(z + 1)) > 0.05:
            zs.append(float(z))
    data = {"n": G.n, "edges": G.edge_count, "samples": len(zs), "max_relative_residual": ihara_bass_check(G, zs)}
    if 2 * G.edge_count <= 60:
        lhs, rhs = ihara_bass_exact(G, 3)
        data.update(exact_z=3, exact_lhs=lhs, exact_rhs=rhs, exact_agree=lhs == rhs)
    _emit(args, data)
    tol = args.tol or 1e-9
    return EXIT_OK if data["max_relative_residual"] <= tol and data.get("exact_agree", True) else EXIT_FAIL


def cmd_er_sweep(args):
    from .harness import er_sweep, row_dict, rows_to_csv, summarize

    seeds = range(args.seed, args.seed + args.seeds)
    results = er_sweep(args.n, args.d, seeds, threads=args.threads)
    rows = [r for r, _ in results]
    if args.certs:
        os.makedirs(args.certs, exist_ok=True)
        for r, c in results:
            if c is not None:
                c.save(os.path.join(args.certs, f"er_n{r.n}_d{r.d:g}_s{r.seed}.json"))
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    if args.format == "csv" or not args.out:
        sys.stdout.write(text)
    elif args.format == "json":
        sys.stdout.write(json.dumps([row_dict(r) for r in rows], indent=2) + "\n")
    for d, s in summarize(rows).items():
        sys.stderr.write(
            f"summary d={d:g}: {s['r_star_within']}/{s['rows']} rows with r_star >= -(sqrt(d)+0.5); "
            f"skipped {s['skipped']}; theory_lower {s['theory_lower']:.5f}; theory_upper {s['theory_upper']:.5f}; "
            f"d_first(3) {s['d_first_k3']:.4f}; d_second(3) {s['d_second_k3']:.4f}\n")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="64-bit seed (default 0)")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="tolerance override")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes")
    common.add_argument("--format", choices=("text", "json", "csv"), default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="nbcolor", description="Vector-coloring bounds from non-backtracking spectra.")
    p.add_argument("--version", action="version", version=f"nbcolor {__version__}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    a = add("analyze", cmd_analyze, "structural and spectral report")
    a.add_argument("graph")
    a = add("certify", cmd_certify, "certified lower bound on chi_v")
    a.add_argument("graph")
    a.add_argument("--r", default="auto", help="'auto' or a negative number")
    a.add_argument("--emit", help="write the certificate JSON here")
    a = add("verify", cmd_verify, "check a certificate or a vector coloring")
    a.add_argument("graph")
    a.add_argument("--cert")
    a.add_argument("--vectors")
    a.add_argument("--kappa")
    a = add("color", cmd_color, "build walk vectors, verify, optionally round")
    a.add_argument("graph")
    a.add_argument("--m", default="auto")
    a.add_argument("--maxcut", type=int, default=0, metavar="TRIALS")
    a.add_argument("--gram-out")
    a.add_argument("--vectors-out")
    a.add_argument("--cut-out")
    a = add("maxcut", cmd_maxcut, "hyperplane rounding of the walk vectors")
    a.add_argument("graph")
    a.add_argument("--m", default="auto")
    a.add_argument("--trials", type=int, default=10_000)
    a.add_argument("--cut-out")
    a = add("oracle", cmd_oracle, "exact chi_v for n <= 64")
    a.add_argument("graph")
    a = add("ihara-check", cmd_ihara, "Ihara-Bass identity at random points")
    a.add_argument("graph")
    a.add_argument("--samples", type=int, default=20)
    a = add("er-sweep", cmd_er_sweep, "Erdos-Renyi certification sweep")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--d", type=float, nargs="+", required=True)
    a.add_argument("--seeds", type=int, default=10)
    a.add_argument("--out")
    a.add_argument("--certs", help="directory for per-row certificates")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except EligibilityError as exc:
        print(f"ineligible input: {exc}", file=sys.stderr)
        return EXIT_INELIGIBLE
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (NBColorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
