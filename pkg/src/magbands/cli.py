"""Command line interface.

Every invocation prints one JSON summary object on stdout.  Exit codes:
0 all requested checks passed, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .bloch import MODELS, ReducedFlux, verify_symbol_symmetries
from .butterfly import export_csv, resolve_threads, sweep
from .potential import KagomePotential, eval_V, sup_argmax, verify_wells
from .spectra import (
    FACTORIZATION_CASES,
    FLAT_BAND_CATALOG,
    band_spectrum,
    check_symmetry,
    detect_flat_bands,
    relations_for_model,
    run_flat_band_catalog,
    verify_factorization,
)
from .svg import render_svg
from .truncation import isospectrality_check

# default fluxes for the symmetry suite; includes a negative-p case
SYMMETRY_FLUXES = [(1, 2), (1, 3), (2, 3), (-1, 3), (3, 4)]

FACTORIZATION_PASS_TOL = 1e-7
ORACLE_PASS_TOL = 1e-9
SYMBOL_PASS_TOL = 1e-12
WELL_OFFSET_TOL = 1e-6
POTENTIAL_SYMMETRY_TOL = 1e-10


def parse_omega(text):
    """Accept a float literal or the token 'pi8' for pi/8."""
    if text == "pi8":
        return math.pi / 8.0
    try:
        return float(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"invalid omega {text!r} (float or 'pi8')") from err


def _model_arg(sub, required=True):
    sub.add_argument("--model", choices=sorted(MODELS), required=required)


def build_parser():
    parser = argparse.ArgumentParser(prog="magbands", description=__doc__)
    parser.add_argument("--version", action="version", version=f"magbands {__version__}")
    cmds = parser.add_subparsers(dest="command", required=True)

    p_bands = cmds.add_parser("bands", help="band intervals for one flux value")
    _model_arg(p_bands)
    p_bands.add_argument("--p", type=int, required=True)
    p_bands.add_argument("--q", type=int, required=True)
    p_bands.add_argument("--omega", type=parse_omega, default=0.0)
    p_bands.add_argument("--grid", type=int, default=60)
    p_bands.add_argument("--out", default=None)

    p_bf = cmds.add_parser("butterfly", help="flux sweep with CSV (and SVG) output")
    _model_arg(p_bf)
    p_bf.add_argument("--omega", type=parse_omega, default=0.0)
    p_bf.add_argument("--qmax", type=int, required=True)
    p_bf.add_argument("--grid", type=int, default=12)
    p_bf.add_argument("--threads", default="auto")
    p_bf.add_argument("--out", required=True)
    p_bf.add_argument("--svg", default=None)

    p_verify = cmds.add_parser("verify", help="run verification suites")
    checks = p_verify.add_subparsers(dest="check", required=True)

    c_sym = checks.add_parser("symmetries", help="spectrum symmetry relations")
    _model_arg(c_sym)
    c_sym.add_argument("--omega", type=parse_omega, default=0.0)
    c_sym.add_argument("--cases", default="all", help="comma-separated relation ids")
    c_sym.add_argument("--grid", type=int, default=36)

    c_flat = checks.add_parser("flatbands", help="flat band catalog")
    c_flat.add_argument("--omega", choices=["0", "pi8"], default=None)

    c_fact = checks.add_parser("factorizations", help="characteristic polynomial identities")
    c_fact.add_argument("--samples", type=int, default=100)

    c_oracle = checks.add_parser("oracle", help="truncated-operator isospectrality")
    c_oracle.add_argument("--p", type=int, required=True)
    c_oracle.add_argument("--q", type=int, required=True)
    c_oracle.add_argument("--omega", type=parse_omega, default=0.0)
    c_oracle.add_argument("--L1", type=int, default=None)
    c_oracle.add_argument("--L2", type=int, default=None)

    c_symb = checks.add_parser("symbol", help="kagome symbol symmetry identities")
    c_symb.add_argument("--samples", type=int, default=1000)
    c_symb.add_argument("--seed", type=int, default=0)

    p_pot = cmds.add_parser("potential", help="kagome potential tools")
    pot_checks = p_pot.add_subparsers(dest="check", required=True)
    c_pot = pot_checks.add_parser("check", help="validate wells and symmetries")
    c_pot.add_argument("--exponent", type=int, default=2)
    c_pot.add_argument("--grid", type=int, default=1024)
    c_pot.add_argument("--out", default=None)

    return parser


def _emit(payload, ok):
    payload["ok"] = bool(ok)
    json.dump(payload, sys.stdout, indent=1, default=float)
    sys.stdout.write("\n")
    return 0 if ok else 1


def run_bands(args):
    spec = band_spectrum(args.model, ReducedFlux(args.p, args.q), args.omega, args.grid)
    flats = detect_flat_bands(spec)
    payload = {
        "command": "bands",
        "model": args.model,
        "p": args.p,
        "q": args.q,
        "omega": args.omega,
        "grid": args.grid,
        "bands": [{"index": b.index, "lo": b.lo, "hi": b.hi} for b in spec.bands],
        "merged": [[lo, hi] for lo, hi in spec.merged],
        "flat_bands": [
            {"value": f.value, "multiplicity": f.multiplicity, "max_width": f.max_width}
            for f in flats
        ],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    return _emit(payload, True)


def run_butterfly(args):
    t0 = time.time()
    threads = resolve_threads(args.threads)
    ds = sweep(args.model, args.omega, args.qmax, args.grid, parallelism=threads)
    export_csv(ds, args.out)
    if args.svg:
        render_svg(ds, args.svg, flat_highlight=True)
    payload = {
        "command": "butterfly",
        "model": args.model,
        "omega": args.omega,
        "qmax": args.qmax,
        "grid": args.grid,
        "threads": threads,
        "flux_values": len({(p, q) for p, q, *_ in ds.rows}),
        "rows": len(ds.rows),
        "csv": args.out,
        "svg": args.svg,
        "seconds": round(time.time() - t0, 3),
    }
    return _emit(payload, True)


def run_verify_symmetries(args):
    relations = relations_for_model(args.model)
    if args.cases != "all":
        wanted = [c.strip() for c in args.cases.split(",") if c.strip()]
        by_id = {r.rid: r for r in relations}
        missing = [c for c in wanted if c not in by_id]
        if missing:
            print(f"unknown relation ids for {args.model}: {missing}", file=sys.stderr)
            return 2
        relations = [by_id[c] for c in wanted]
    results = []
    for rel in relations:
        for p, q in SYMMETRY_FLUXES:
            res = check_symmetry(rel.rid, ReducedFlux(p, q), args.omega, args.grid)
            results.append(
                {
                    "relation": rel.rid,
                    "p": p,
                    "q": q,
                    "omega": res.omega,
                    "deviation": res.deviation,
                    "pass": res.passed,
                }
            )
    ok = all(r["pass"] for r in results)
    return _emit(
        {"command": "verify symmetries", "model": args.model, "grid": args.grid, "results": results},
        ok,
    )


def run_verify_flatbands(args):
    keys = [args.omega] if args.omega else ["0", "pi8"]
    results = {k: run_flat_band_catalog(k) for k in keys}
    ok = all(case["ok"] for k in keys for case in results[k])
    return _emit({"command": "verify flatbands", "results": results}, ok)


def run_verify_factorizations(args):
    results = []
    for cid in FACTORIZATION_CASES:
        devn = verify_factorization(cid, lambda_samples=args.samples)
        results.append({"case": cid, "deviation": devn, "pass": devn < FACTORIZATION_PASS_TOL})
    ok = all(r["pass"] for r in results)
    return _emit({"command": "verify factorizations", "samples": args.samples, "results": results}, ok)


def run_verify_oracle(args):
    flux = ReducedFlux(args.p, args.q)
    L1 = args.L1 if args.L1 is not None else 2 * args.q
    L2 = args.L2 if args.L2 is not None else 4
    devn = isospectrality_check(flux, args.omega, L1, L2)
    ok = devn < ORACLE_PASS_TOL
    return _emit(
        {
            "command": "verify oracle",
            "p": args.p,
            "q": args.q,
            "omega": args.omega,
            "L1": L1,
            "L2": L2,
            "deviation": devn,
            "tolerance": ORACLE_PASS_TOL,
        },
        ok,
    )


def run_verify_symbol(args):
    devs = verify_symbol_symmetries(samples=args.samples, seed=args.seed)
    ok = all(d < SYMBOL_PASS_TOL for d in devs.values())
    return _emit(
        {"command": "verify symbol", "samples": args.samples, "seed": args.seed, "deviations": devs},
        ok,
    )


def run_potential_check(args):
    pot = KagomePotential(exponent=args.exponent, sup_grid=args.grid)
    wells = verify_wells(pot, tol=WELL_OFFSET_TOL)

    rng = np.random.default_rng(0)
    pts = rng.uniform(-3.0, 3.0, size=(1000, 2))
    base = eval_V(pts, pot)
    two_nu1 = np.array([2.0, 0.0])
    rot = np.array([[0.5, -math.sqrt(3) / 2], [math.sqrt(3) / 2, 0.5]])
    sym_dev = max(
        float(np.max(np.abs(eval_V(pts + two_nu1, pot) - base))),
        float(np.max(np.abs(eval_V(pts @ rot.T, pot) - base))),
    )
    argmax = sup_argmax(args.exponent, grid=min(args.grid, 512))

    offsets_ok = all(w.offset < WELL_OFFSET_TOL for w in wells)
    hess_ok = all(min(w.hessian_eigenvalues) > 0 for w in wells)
    ok = offsets_ok and hess_ok and sym_dev < POTENTIAL_SYMMETRY_TOL

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump([w.as_dict() for w in wells], fh, indent=1)
            fh.write("\n")
    return _emit(
        {
            "command": "potential check",
            "exponent": args.exponent,
            "grid": args.grid,
            "sup_value": pot.sup_value,
            "sup_argmax": [float(argmax[0]), float(argmax[1])],
            "symmetry_deviation": sym_dev,
            "wells": [w.as_dict() for w in wells],
            "well_offsets_ok": offsets_ok,
            "hessians_positive": hess_ok,
            "out": args.out,
        },
        ok,
    )


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bands":
        return run_bands(args)
    if args.command == "butterfly":
        return run_butterfly(args)
    if args.command == "verify":
        return {
            "symmetries": run_verify_symmetries,
            "flatbands": run_verify_flatbands,
            "factorizations": run_verify_factorizations,
            "oracle": run_verify_oracle,
            "symbol": run_verify_symbol,
        }[args.check](args)
    if args.command == "potential":
        return run_potential_check(args)
    parser.error(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
