"""Kagome electric potential: construction, well validation, harmonic energy.

The potential is built from three trigonometric profiles along the directions
mu_j = sqrt(3) * nu_j rotated by pi/2 (j = 1, 3, 5), each squared and raised
to an even exponent, summed, and flipped so that wells sit at the kagome
sites:

    W_j(x)   = [cos(pi x.mu_j + phi) + 2 cos((pi x.mu_j + phi)/3)]^2
    tilde(x) = sum_j W_j(x)^(exponent/2)
    V(x)     = sup(tilde) - tilde(x)

with phi = 3*pi/2.  sup(tilde) has no known closed form; it is computed by a
fundamental-domain grid scan plus a local ascent refinement.  Whether the
zero set of V is exactly the kagome lattice is an observed fact, not a
theorem, so the well validator records V at each minimum without asserting
it vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .lattice import SQRT3, LatticePoint, enumerate_points, nu

DEFAULT_PHASE = 1.5 * math.pi
WELL_SEARCH_RADIUS = 0.4
HESSIAN_STEP = 1e-4


def mu(j):
    """sqrt(3) times nu_j rotated by pi/2; only j in {1, 3, 5} is meaningful."""
    if j not in (1, 3, 5):
        raise ValueError(f"j must be in (1, 3, 5), got {j}")
    v = nu(j)
    return SQRT3 * np.array([-v[1], v[0]])


@dataclass(frozen=True)
class KagomePotential:
    """Immutable potential with its sup already computed."""

    exponent: int = 2
    phase: float = DEFAULT_PHASE
    sup_value: float = None
    sup_grid: int = 1024

    def __post_init__(self):
        if self.exponent < 2 or self.exponent % 2 != 0:
            raise ValueError("exponent must be an even integer >= 2")
        if self.sup_value is None:
            object.__setattr__(self, "sup_value", compute_sup(self.exponent, self.phase, self.sup_grid))

    def tilde(self, x):
        return eval_tilde(x, self.exponent, self.phase)

    def __call__(self, x):
        return eval_V(x, self)


def eval_tilde(x, exponent=2, phase=DEFAULT_PHASE):
    """Sum of the three squared profiles (raised to exponent/2); vectorized
    over leading axes of x (shape (..., 2))."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for j in (1, 3, 5):
        mj = mu(j)
        t = np.pi * (x[..., 0] * mj[0] + x[..., 1] * mj[1]) + phase
        w = (np.cos(t) + 2.0 * np.cos(t / 3.0)) ** 2
        total = total + w ** (exponent // 2)
    return total


def eval_V(x, pot):
    """V(x) = sup - tilde(x); nonnegative up to the sup's numerical accuracy."""
    return pot.sup_value - eval_tilde(x, pot.exponent, pot.phase)


def fundamental_domain_grid(n):
    """n x n grid of points t1*(2 nu_1) + t2*(2 nu_2), t in [0, 1)^2."""
    t = np.arange(n) / n
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    e1 = 2.0 * nu(1)
    e2 = 2.0 * nu(2)
    return t1[..., None] * e1 + t2[..., None] * e2


def compute_sup(exponent=2, phase=DEFAULT_PHASE, grid=1024):
    """Maximum of tilde over one fundamental domain.

    Grid scan followed by derivative-free local ascent from the argmax; the
    refined value is never allowed below the grid value.
    """
    pts = fundamental_domain_grid(grid)
    vals = eval_tilde(pts, exponent, phase)
    imax = np.unravel_index(int(np.argmax(vals)), vals.shape)
    x0 = pts[imax]
    grid_max = float(vals[imax])
    res = optimize.minimize(
        lambda x: -eval_tilde(x, exponent, phase),
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-13, "fatol": 1e-14, "maxiter": 4000},
    )
    return max(grid_max, float(-res.fun))


def sup_argmax(exponent=2, phase=DEFAULT_PHASE, grid=1024):
    """Refined argmax of tilde in the fundamental domain (for reporting)."""
    pts = fundamental_domain_grid(grid)
    vals = eval_tilde(pts, exponent, phase)
    imax = np.unravel_index(int(np.argmax(vals)), vals.shape)
    res = optimize.minimize(
        lambda x: -eval_tilde(x, exponent, phase),
        pts[imax],
        method="Nelder-Mead",
        options={"xatol": 1e-13, "fatol": 1e-14, "maxiter": 4000},
    )
    return np.asarray(res.x)


# ---------------------------------------------------------------------------
# Finite-difference derivatives


def fd_gradient(f, x, step=1e-6):
    x = np.asarray(x, float)
    g = np.zeros(2)
    for k in range(2):
        e = np.zeros(2)
        e[k] = step
        g[k] = (f(x + e) - f(x - e)) / (2.0 * step)
    return g


def fd_hessian(f, x, step=HESSIAN_STEP):
    """Central second differences, symmetrized."""
    x = np.asarray(x, float)
    H = np.zeros((2, 2))
    for a in range(2):
        for b in range(2):
            ea = np.zeros(2)
            eb = np.zeros(2)
            ea[a] = step
            eb[b] = step
            H[a, b] = (f(x + ea + eb) - f(x + ea - eb) - f(x - ea + eb) + f(x - ea - eb)) / (
                4.0 * step * step
            )
    return 0.5 * (H + H.T)


def fd_hessian_refined(f, x, step=HESSIAN_STEP):
    """Richardson extrapolation of the central stencil over steps (2h, h);
    kills the O(h^2) truncation term, leaving rounding noise ~1e-7 here."""
    return (4.0 * fd_hessian(f, x, step) - fd_hessian(f, x, 2.0 * step)) / 3.0


# ---------------------------------------------------------------------------
# Well validation


@dataclass(frozen=True)
class WellReport:
    location: tuple
    value: float
    hessian_eigenvalues: tuple
    nearest_lattice_point: LatticePoint
    offset: float

    def as_dict(self):
        pt = self.nearest_lattice_point
        return {
            "location": list(self.location),
            "value": self.value,
            "hessian_eigenvalues": list(self.hessian_eigenvalues),
            "nearest_lattice_point": {"alpha": list(pt.alpha), "ell": pt.ell},
            "offset": self.offset,
        }


def _nearest_lattice_point(x):
    best = None
    best_d = math.inf
    for pt in enumerate_points(2):
        d = float(np.hypot(*(pt.cartesian() - x)))
        if d < best_d:
            best, best_d = pt, d
    return best, best_d


def locate_well(pot, seed, grad_tol=1e-9, max_iter=120):
    """Damped Newton descent on the finite-difference gradient of V.

    Away from a well (Hessian not positive definite) the step degrades to
    steepest descent; a stalled line search falls back to coordinate descent
    with step halving.  Raises if the iterate leaves a 0.4-radius ball around
    the seed, or never meets the gradient tolerance.
    """
    f = lambda x: eval_V(x, pot)
    seed = np.asarray(seed, float)
    x = seed.copy()
    for _ in range(max_iter):
        g = fd_gradient(f, x)
        gn = float(np.linalg.norm(g))
        if gn < grad_tol:
            return x
        H = fd_hessian(f, x)
        if np.linalg.eigvalsh(H).min() > 0:
            step = np.linalg.solve(H, -g)
        else:
            step = -g / max(gn, 1.0) * 0.05
        trial = x + step
        # damping: halve until V decreases or the step is negligible
        scale = 1.0
        while f(trial) > f(x) + 1e-15 and scale > 1e-6:
            scale *= 0.5
            trial = x + scale * step
        if scale <= 1e-6:
            trial = _coordinate_descent_step(f, x)
        x = trial
        if float(np.hypot(*(x - seed))) > WELL_SEARCH_RADIUS:
            raise RuntimeError(
                f"descent from seed {seed.tolist()} left the radius-"
                f"{WELL_SEARCH_RADIUS} trust ball at {x.tolist()}"
            )
    raise RuntimeError(
        f"descent from seed {seed.tolist()} did not reach gradient tolerance "
        f"{grad_tol} within {max_iter} iterations"
    )


def _coordinate_descent_step(f, x, step0=1e-3):
    x = x.copy()
    for k in range(2):
        step = step0
        while step > 1e-12:
            for s in (+1.0, -1.0):
                trial = x.copy()
                trial[k] += s * step
                if f(trial) < f(x):
                    x = trial
                    break
            else:
                step *= 0.5
                continue
            break
    return x


def verify_wells(pot, tol=1e-6):
    """Locate the well nearest each of the three cell sites and report it.

    Offsets beyond `tol`, non-positive Hessian eigenvalues, or a descent that
    escapes the seed's trust ball indicate a defective potential; the V value
    at the bottom is recorded as data, not asserted to vanish.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    f = lambda x: eval_V(x, pot)
    reports = []
    for ell in (1, 3, 5):
        seed = nu(ell)
        loc = locate_well(pot, seed)
        H = fd_hessian_refined(f, loc)
        eigs = np.linalg.eigvalsh(H)
        pt, offset = _nearest_lattice_point(loc)
        reports.append(
            WellReport(
                location=(float(loc[0]), float(loc[1])),
                value=float(f(loc)),
                hessian_eigenvalues=(float(eigs[0]), float(eigs[1])),
                nearest_lattice_point=pt,
                offset=float(offset),
            )
        )
    return reports


def harmonic_ground_energy(lambda1, lambda2, B, h):
    """Ground energy of the quadratic well with magnetic field: the well's
    Hessian eigenvalues lambda1, lambda2 combine into
    lam = (sqrt(lambda1) + sqrt(lambda2)) / sqrt(2), and the energy is
    h * sqrt(lam^2 + B^2)."""
    if lambda1 <= 0 or lambda2 <= 0:
        raise ValueError("Hessian eigenvalues must be positive")
    if h <= 0:
        raise ValueError("h must be positive")
    lam = (math.sqrt(lambda1) + math.sqrt(lambda2)) / math.sqrt(2.0)
    return h * math.sqrt(lam * lam + B * B)
