"""Flux sweeps over reduced fractions and dataset export (CSV / JSON).

A butterfly dataset holds one row per (flux, band index):
(p, q, band_index, band_lo, band_hi), swept over all reduced fractions
0 <= p < period*q, q <= qmax, where `period` is the model's gamma/(2*pi)
spectral period.  Sweeps are a parallel map over flux values with a
deterministic ordered reduction, so output is identical for any thread count.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__
from .bloch import MODELS, ReducedFlux
from .spectra import band_spectrum

DEFAULT_SWEEP_GRID = 12

CSV_HEADER = ["model", "p", "q", "gamma_over_2pi", "omega", "band_index", "band_lo", "band_hi"]


def flux_list(model, qmax):
    """All reduced fractions (p, q) with q <= qmax, 0 <= p < period*q."""
    period = MODELS[model].flux_period
    out = []
    for q in range(1, qmax + 1):
        for p in range(period * q):
            if math.gcd(p, q) == 1:
                out.append((p, q))
    return out


@dataclass
class ButterflyDataset:
    model: str
    omega: float
    grid: int
    rows: list = field(default_factory=list)  # (p, q, band_index, lo, hi)
    manifest: dict = field(default_factory=dict)

    def flat_rows(self, width_tol=1e-9):
        return [r for r in self.rows if r[4] - r[3] < width_tol]


def resolve_threads(requested=None):
    """Thread count: BUTTERFLY_THREADS env wins, then the request, then auto."""
    env = os.environ.get("BUTTERFLY_THREADS")
    if env:
        return max(1, int(env))
    if requested in (None, "auto"):
        return os.cpu_count() or 1
    return max(1, int(requested))


def sweep(model, omega=0.0, qmax=10, grid=DEFAULT_SWEEP_GRID, parallelism=None):
    """Band spectra for every reduced fraction; rows sorted by (q, p, band)."""
    if qmax < 1:
        raise ValueError("qmax must be >= 1")
    fluxes = flux_list(model, qmax)
    threads = resolve_threads(parallelism)

    def one(pq):
        p, q = pq
        spec = band_spectrum(model, ReducedFlux(p, q), omega, grid)
        return [(p, q, b.index, b.lo, b.hi) for b in spec.bands]

    if threads == 1:
        chunks = {pq: one(pq) for pq in fluxes}
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = dict(zip(fluxes, pool.map(one, fluxes)))

    rows = []
    for p, q in sorted(fluxes, key=lambda pq: (pq[1], pq[0])):
        rows.extend(chunks[(p, q)])
    manifest = {
        "tool": "magbands",
        "version": __version__,
        "model": model,
        "omega": omega,
        "qmax": qmax,
        "flux_period": MODELS[model].flux_period,
        "grid": grid,
        "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return ButterflyDataset(model=model, omega=omega, grid=grid, rows=rows, manifest=manifest)


def _fmt(x):
    return format(float(x), ".17g")


def export_csv(ds, path):
    """Write the dataset as UTF-8 CSV with \\n newlines, 17 significant digits."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for p, q, k, lo, hi in ds.rows:
                w.writerow([ds.model, p, q, _fmt(p / q), _fmt(ds.omega), k, _fmt(lo), _fmt(hi)])
    except OSError as err:
        raise OSError(f"failed writing CSV to {path}: {err}") from err
    return path


def read_csv(path):
    """Re-import an exported CSV; rows and model/omega round-trip exactly."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != CSV_HEADER:
                raise ValueError(f"unexpected CSV header in {path}: {header}")
            rows = []
            model = None
            omega = 0.0
            for rec in reader:
                model = rec[0]
                omega = float(rec[4])
                rows.append((int(rec[1]), int(rec[2]), int(rec[5]), float(rec[6]), float(rec[7])))
    except OSError as err:
        raise OSError(f"failed reading CSV from {path}: {err}") from err
    return ButterflyDataset(model=model, omega=omega, grid=0, rows=rows, manifest={"source": str(path)})


def export_json(ds, path):
    """One object {manifest, rows}; rows as [p, q, band_index, lo, hi] arrays."""
    payload = {"manifest": ds.manifest, "rows": [list(r) for r in ds.rows]}
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    except OSError as err:
        raise OSError(f"failed writing JSON to {path}: {err}") from err
    return path


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as err:
        raise OSError(f"failed reading JSON from {path}: {err}") from err
    man = payload["manifest"]
    rows = [(int(p), int(q), int(k), float(lo), float(hi)) for p, q, k, lo, hi in payload["rows"]]
    return ButterflyDataset(
        model=man["model"], omega=float(man["omega"]), grid=int(man["grid"]), rows=rows, manifest=man
    )
