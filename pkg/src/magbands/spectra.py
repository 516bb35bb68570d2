"""Eigenvalue machinery: band spectra over the Bloch torus, flat bands,
spectrum symmetries, and characteristic-polynomial factorization checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bloch import MODELS, ReducedFlux, _as_flux, assert_hermitian, bloch_stack

RANGE_SLACK = 1e-12
MERGE_TOL = 1e-9
FLAT_WIDTH_TOL = 1e-9
FLAT_CLUSTER_TOL = 1e-7
SYMMETRY_PASS_TOL = 1e-6

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)


def eigenvalues(m):
    """All eigenvalues of a Hermitian matrix, ascending, with multiplicity."""
    m = np.asarray(m)
    assert_hermitian(m)
    return np.linalg.eigvalsh(m)


def charpoly_eval(m, lam):
    """prod_k (lam - lambda_k), i.e. det(lam*I - M) up to eigensolver accuracy."""
    return float(np.prod(lam - eigenvalues(m)))


@dataclass(frozen=True)
class Band:
    """Range of the k-th sorted eigenvalue over the sampled torus grid."""

    index: int  # 1-based
    lo: float
    hi: float
    samples: int


@dataclass(frozen=True)
class FlatBand:
    value: float
    multiplicity: int
    max_width: float


@dataclass
class SpectrumSet:
    model: str
    flux: ReducedFlux
    omega: float
    grid: int
    bands: list = field(default_factory=list)
    merged: list = field(default_factory=list)

    def band_intervals(self):
        return [(b.lo, b.hi) for b in self.bands]


def merge_intervals(intervals, tol=MERGE_TOL):
    """Union of closed intervals; touching within tol are fused."""
    ivs = sorted(intervals)
    out = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1] + tol:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


def band_spectrum(model, flux, omega=0.0, grid=60):
    """Bands of the model spectrum sampled on the uniform grid {j/grid}^2.

    Band k is the [min, max] of the k-th sorted eigenvalue over the grid;
    `merged` is the interval union.  Every eigenvalue is checked against the
    model's global energy bound.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    info = MODELS[model]
    flux = _as_flux(flux)
    dim = info.blocks * flux.q
    thetas = np.arange(grid) / grid
    t1g, t2g = np.meshgrid(thetas, thetas, indexing="ij")
    t1g, t2g = t1g.ravel(), t2g.ravel()

    # batch eigvalsh over theta points, capped at ~64 MB of matrix stack
    chunk = max(1, int(4_000_000 / (dim * dim)))
    lo = np.full(dim, np.inf)
    hi = np.full(dim, -np.inf)
    for start in range(0, t1g.size, chunk):
        stack = bloch_stack(model, flux, omega, t1g[start:start + chunk], t2g[start:start + chunk])
        ev = np.linalg.eigvalsh(stack)
        lo = np.minimum(lo, ev.min(axis=0))
        hi = np.maximum(hi, ev.max(axis=0))

    bound = info.energy_bound + RANGE_SLACK
    if lo.min() < -bound or hi.max() > bound:
        raise RuntimeError(
            f"{model} spectrum escaped [-{info.energy_bound}, {info.energy_bound}]: "
            f"[{lo.min():.15g}, {hi.max():.15g}]"
        )

    bands = [Band(k + 1, float(lo[k]), float(hi[k]), grid * grid) for k in range(dim)]
    return SpectrumSet(
        model=model,
        flux=flux,
        omega=omega,
        grid=grid,
        bands=bands,
        merged=merge_intervals([(b.lo, b.hi) for b in bands]),
    )


def detect_flat_bands(spectrum, width_tol=FLAT_WIDTH_TOL):
    """Group bands of width <= width_tol into value clusters.

    Returns FlatBand(value=cluster mean, multiplicity=cluster size, max_width).
    """
    flats = [b for b in spectrum.bands if b.hi - b.lo <= width_tol]
    flats.sort(key=lambda b: b.lo)
    out = []
    cluster = []
    for b in flats:
        if cluster and b.lo - cluster[-1].lo > FLAT_CLUSTER_TOL:
            out.append(cluster)
            cluster = []
        cluster.append(b)
    if cluster:
        out.append(cluster)
    return [
        FlatBand(
            value=float(np.mean([0.5 * (b.lo + b.hi) for b in c])),
            multiplicity=len(c),
            max_width=max(b.hi - b.lo for b in c),
        )
        for c in out
    ]


# ---------------------------------------------------------------------------
# Set distance between merged spectra


def hausdorff_distance(a, b):
    """Hausdorff distance between two closed interval unions of the real line."""
    if not a or not b:
        raise ValueError("empty interval list")
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


def _point_distance(x, intervals):
    best = math.inf
    for lo, hi in intervals:
        if lo <= x <= hi:
            return 0.0
        best = min(best, abs(x - lo), abs(x - hi))
    return best


def _directed_hausdorff(a, b):
    # sup_{x in a} d(x, b): attained at an endpoint of a or at a gap midpoint
    # of b lying inside a.
    cands = [e for lo, hi in a for e in (lo, hi)]
    for (l1, h1), (l2, h2) in zip(b, b[1:]):
        mid = 0.5 * (h1 + l2)
        if any(lo <= mid <= hi for lo, hi in a):
            cands.append(mid)
    return max(_point_distance(x, b) for x in cands)


def negate_intervals(intervals):
    return sorted((-hi, -lo) for lo, hi in intervals)


# ---------------------------------------------------------------------------
# Spectrum symmetry relations


@dataclass(frozen=True)
class SymmetryRelation:
    """One printed spectral identity, as a flux/omega transform plus a flag.

    The check compares spectrum(model, p, q, omega) with
    spectrum(model, *transform(p, q, omega)), negating the second merged set
    when `negate` is true.  `fixed_omega` pins relations that only hold at a
    specific omega.
    """

    rid: str
    model: str
    transform: object  # (p, q, omega) -> (p2, q2, omega2)
    negate: bool = False
    fixed_omega: float = None


def _rel(rid, model, transform, negate=False, fixed_omega=None):
    return SymmetryRelation(rid, model, transform, negate, fixed_omega)


SYMMETRY_RELATIONS = {
    r.rid: r
    for r in [
        # kagome: flux translations/reflections of the spectrum
        _rel("kagtrans", "kagome", lambda p, q, w: (p + 8 * q, q, w)),
        _rel("kagreflex4", "kagome", lambda p, q, w: (p + 4 * q, q, w), negate=True),
        _rel("kagreflex1", "kagome", lambda p, q, w: (-p, q, w), fixed_omega=0.0),
        _rel("kagreflex5", "kagome", lambda p, q, w: (4 * q - p, q, w), negate=True, fixed_omega=0.0),
        _rel("kagreflex11", "kagome", lambda p, q, w: (3 * q - p, q, w), fixed_omega=math.pi / 8),
        _rel("kagreflex12", "kagome", lambda p, q, w: (-q - p, q, w), negate=True, fixed_omega=math.pi / 8),
        # kagome: omega shifts
        _rel("gammatrans", "kagome", lambda p, q, w: (p - 3 * q, q, w - math.pi / 4)),
        _rel("gammasym", "kagome", lambda p, q, w: (-p, q, -w)),
        # square
        _rel("squaretrans", "square", lambda p, q, w: (p + q, q, w)),
        _rel("squarereflex1", "square", lambda p, q, w: (-p, q, w)),
        _rel("squarereflex12", "square", lambda p, q, w: (q - p, q, w)),
        _rel("squarereflex2", "square", lambda p, q, w: (p, q, w), negate=True),
        # triangular
        _rel("tritrans", "triangular", lambda p, q, w: (p + 2 * q, q, w)),
        _rel("trireflex1", "triangular", lambda p, q, w: (-p, q, w)),
        _rel("triantitrans", "triangular", lambda p, q, w: (q - p, q, w), negate=True),
        # hexagonal
        _rel("hextrans", "hexagonal", lambda p, q, w: (p + q, q, w)),
        _rel("hexreflex1", "hexagonal", lambda p, q, w: (-p, q, w)),
        _rel("hexreflex12", "hexagonal", lambda p, q, w: (q - p, q, w)),
        _rel("hexreflex2", "hexagonal", lambda p, q, w: (p, q, w), negate=True),
    ]
}


def relations_for_model(model):
    return [r for r in SYMMETRY_RELATIONS.values() if r.model == model]


@dataclass(frozen=True)
class SymmetryResult:
    rid: str
    model: str
    flux: ReducedFlux
    omega: float
    deviation: float
    passed: bool


def check_symmetry(rid, flux, omega=None, grid=36):
    """Evaluate one symmetry relation; pass iff Hausdorff distance <= 1e-6."""
    rel = SYMMETRY_RELATIONS.get(rid)
    if rel is None:
        raise KeyError(f"unknown relation {rid!r}")
    flux = _as_flux(flux)
    w = rel.fixed_omega if rel.fixed_omega is not None else (omega or 0.0)
    p2, q2, w2 = rel.transform(flux.p, flux.q, w)

    lhs = band_spectrum(rel.model, flux, w, grid).merged
    rhs = band_spectrum(rel.model, ReducedFlux(p2, q2), w2, grid).merged
    if rel.negate:
        rhs = negate_intervals(rhs)
    d = hausdorff_distance(lhs, rhs)
    return SymmetryResult(rid, rel.model, flux, w, d, d <= SYMMETRY_PASS_TOL)


# ---------------------------------------------------------------------------
# Characteristic polynomial factorizations for the kagome family


def _ptri(x, xi):
    return np.cos(x) + np.cos(xi) + np.cos(x - xi)


# Degree-12 factors for the two multiplicity-6 flat-band fluxes,
# coefficients in ascending powers of lambda.
_T12 = (
    -9726.0 - 5616.0 * SQRT3,
    9828.0 * SQRT2 + 5652.0 * SQRT6,
    3024.0 + 1836.0 * SQRT3,
    -(8244.0 * SQRT2 + 4596.0 * SQRT6),
    1584.0 + 720.0 * SQRT3,
    2970.0 * SQRT2 + 1350.0 * SQRT6,
    -(828.0 + 540.0 * SQRT3),
    -(612.0 * SQRT2 + 144.0 * SQRT6),
    36.0 + 180.0 * SQRT3,
    38.0 * SQRT2 + 18.0 * SQRT6,
    6.0 - 21.0 * SQRT3,
    3.0 * SQRT2 - 3.0 * SQRT6,
    1.0,
)
_U12 = (
    -9726.0 + 5616.0 * SQRT3,
    36.0 * SQRT2 * (-273.0 + 157.0 * SQRT3),
    108.0 * (28.0 - 17.0 * SQRT3),
    12.0 * SQRT2 * (687.0 - 383.0 * SQRT3),
    144.0 * (11.0 - 5.0 * SQRT3),
    270.0 * SQRT2 * (-11.0 + 5.0 * SQRT3),
    36.0 * (-23.0 + 15.0 * SQRT3),
    36.0 * SQRT2 * (17.0 - 4.0 * SQRT3),
    36.0 * (1.0 - 5.0 * SQRT3),
    2.0 * SQRT2 * (-19.0 + 9.0 * SQRT3),
    3.0 * (2.0 + 7.0 * SQRT3),
    -3.0 * SQRT2 * (1.0 + SQRT3),
    1.0,
)


def _poly(coeffs, lam):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * lam + c
    return acc


@dataclass(frozen=True)
class FactorizationCase:
    case_id: str
    p: int
    q: int
    omega: float
    rhs: object  # (lam, theta1, theta2) -> float


FACTORIZATION_CASES = {
    c.case_id: c
    for c in [
        FactorizationCase(
            "0,1", 0, 1, 0.0,
            lambda lam, t1, t2: (lam + 2.0)
            * ((lam - 1.0) ** 2 - (3.0 + 2.0 * _ptri(2 * np.pi * t1, -2 * np.pi * t2))),
        ),
        FactorizationCase(
            "2,1", 2, 1, 0.0,
            lambda lam, t1, t2: lam
            * (lam ** 2 - (6.0 + 2.0 * _ptri(2 * np.pi * t1, -2 * np.pi * t2))),
        ),
        FactorizationCase(
            "2,3", 2, 3, 0.0,
            lambda lam, t1, t2: (lam + SQRT3) ** 3
            * (lam ** 6 - 3 * SQRT3 * lam ** 5 + 18 * SQRT3 * lam ** 3 - 36 * lam ** 2
               + 6.0 - 2.0 * _ptri(6 * np.pi * t1, -6 * np.pi * t2)),
        ),
        FactorizationCase(
            "4,3", 4, 3, 0.0,
            lambda lam, t1, t2: (lam + 1.0) ** 3
            * (lam ** 6 - 3 * lam ** 5 - 12 * lam ** 4 + 38 * lam ** 3 + 24 * lam ** 2
               - 120 * lam + 70.0 - 2.0 * _ptri(6 * np.pi * t1, -6 * np.pi * t2)),
        ),
        FactorizationCase(
            "1,2", 1, 2, math.pi / 8,
            lambda lam, t1, t2: (lam + SQRT2) ** 2
            * (lam ** 4 - 2 * SQRT2 * lam ** 3 - 6 * lam ** 2 + 12 * SQRT2 * lam
               - 6.0 + 2.0 * _ptri(4 * np.pi * t1, -4 * np.pi * t2)),
        ),
        FactorizationCase(
            "3,2", 3, 2, math.pi / 8,
            lambda lam, t1, t2: (lam + 2.0) ** 2
            * (lam ** 4 - 4 * lam ** 3 + 8 * lam
               - 2.0 + 2.0 * _ptri(4 * np.pi * t1, -4 * np.pi * t2)),
        ),
        FactorizationCase(
            "-1,6", -1, 6, math.pi / 8,
            lambda lam, t1, t2: (lam + (SQRT6 - SQRT2) / 2) ** 6
            * (_poly(_T12, lam) + 2.0 * _ptri(12 * np.pi * t1, -12 * np.pi * t2)),
        ),
        FactorizationCase(
            "7,6", 7, 6, math.pi / 8,
            lambda lam, t1, t2: (lam + (SQRT6 + SQRT2) / 2) ** 6
            * (_poly(_U12, lam) + 2.0 * _ptri(12 * np.pi * t1, -12 * np.pi * t2)),
        ),
    ]
}


def verify_factorization(case_id, phase=None, lambda_samples=100, seed=0):
    """Max relative deviation between the eigenvalue product and the printed
    factorized form, over random lambda in [-5, 5] (and random torus points
    when `phase` is None).  Deviations are normalized by max(1, |rhs|)."""
    case = FACTORIZATION_CASES.get(case_id)
    if case is None:
        raise KeyError(f"unknown factorization case {case_id!r}")
    rng = np.random.default_rng(seed)
    flux = ReducedFlux(case.p, case.q)
    worst = 0.0
    for _ in range(lambda_samples):
        lam = rng.uniform(-5.0, 5.0)
        if phase is None:
            t1, t2 = rng.random(2)
        else:
            t1, t2 = phase
        ev = np.linalg.eigvalsh(bloch_stack("kagome", flux, case.omega, t1, t2))
        lhs = float(np.prod(lam - ev))
        rhs = float(case.rhs(lam, t1, t2))
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


# ---------------------------------------------------------------------------
# Flat band catalog for the kagome family


@dataclass(frozen=True)
class FlatBandCase:
    p: int
    q: int
    omega: float
    value: float
    multiplicity: int


FLAT_BAND_CATALOG = {
    "0": [
        FlatBandCase(0, 1, 0.0, -2.0, 1),
        FlatBandCase(2, 1, 0.0, 0.0, 1),
        FlatBandCase(2, 3, 0.0, -SQRT3, 3),
        FlatBandCase(4, 3, 0.0, -1.0, 3),
    ],
    "pi8": [
        FlatBandCase(1, 2, math.pi / 8, -SQRT2, 2),
        FlatBandCase(3, 2, math.pi / 8, -2.0, 2),
        FlatBandCase(7, 6, math.pi / 8, -(SQRT6 + SQRT2) / 2, 6),
        FlatBandCase(-1, 6, math.pi / 8, -(SQRT6 - SQRT2) / 2, 6),
    ],
}


def run_flat_band_catalog(omega_key, grid=60, value_tol=1e-9, width_tol=1e-10):
    """Check every cataloged flat band at the given omega ("0" or "pi8").

    Returns a list of result dicts (one per case) with the located flat value,
    multiplicity, worst width, and a pass flag.
    """
    results = []
    for case in FLAT_BAND_CATALOG[omega_key]:
        spec = band_spectrum("kagome", ReducedFlux(case.p, case.q), case.omega, grid)
        flats = detect_flat_bands(spec, width_tol=width_tol)
        match = None
        for fb in flats:
            if abs(fb.value - case.value) <= max(value_tol, FLAT_CLUSTER_TOL):
                match = fb
                break
        ok = (
            match is not None
            and match.multiplicity == case.multiplicity
            and abs(match.value - case.value) <= value_tol
            and match.max_width < width_tol
        )
        results.append(
            {
                "p": case.p,
                "q": case.q,
                "omega": case.omega,
                "expected_value": case.value,
                "expected_multiplicity": case.multiplicity,
                "value": None if match is None else match.value,
                "multiplicity": None if match is None else match.multiplicity,
                "max_width": None if match is None else match.max_width,
                "ok": bool(ok),
            }
        )
    return results
