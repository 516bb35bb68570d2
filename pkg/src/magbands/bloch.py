"""Bloch matrix families at rational magnetic flux, and matrix-valued symbols.

For flux gamma = 2*pi*p/q (p, q coprime) each lattice model reduces to a
two-parameter family of Hermitian matrices built from the clock matrix
J_{p,q} = diag(exp(2i*pi*(j-1)*p/q)) and the cyclic shift K_q.  The Bloch
phase (theta1, theta2) lives on the unit torus [0,1)^2 for every model here
(the hexagonal family is normalized to exp(2i*pi*theta) like the others, so
one torus parametrization serves all four).

Phase conventions frozen by the q = 1 calibration tests:
  * kagome:  matrix(0, 1, omega, theta) equals the kagome symbol evaluated
    entrywise at (x, xi) = (-2*pi*theta1, 2*pi*theta2);
  * scalar models: matrix value equals the symbol at (2*pi*theta1, -2*pi*theta2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HERMITICITY_RTOL = 1e-13


@dataclass(frozen=True)
class ReducedFlux:
    """Rational flux gamma/(2*pi) = p/q in lowest terms; q >= 1, p any integer."""

    p: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("flux denominator q must be >= 1")
        if math.gcd(abs(self.p), self.q) != 1:
            raise ValueError(f"flux {self.p}/{self.q} is not in lowest terms")

    def gamma(self):
        return 2.0 * math.pi * self.p / self.q


@dataclass(frozen=True)
class BlochPhase:
    """Point (theta1, theta2) on the unit torus."""

    theta1: float
    theta2: float

    def __post_init__(self):
        object.__setattr__(self, "theta1", self.theta1 % 1.0)
        object.__setattr__(self, "theta2", self.theta2 % 1.0)


@dataclass(frozen=True)
class ModelInfo:
    name: str
    blocks: int        # matrix dimension is blocks * q
    energy_bound: float
    flux_period: int   # spectrum is flux-periodic with period flux_period * 2*pi
    uses_omega: bool


MODELS = {
    "square": ModelInfo("square", 1, 2.0, 1, False),
    "triangular": ModelInfo("triangular", 1, 3.0, 2, False),
    "hexagonal": ModelInfo("hexagonal", 2, 3.0, 1, False),
    "kagome": ModelInfo("kagome", 3, 4.0, 8, True),
}


def _as_flux(flux):
    if isinstance(flux, ReducedFlux):
        return flux
    return ReducedFlux(*flux)


def _phase_arrays(phase):
    if isinstance(phase, BlochPhase):
        t1, t2 = phase.theta1, phase.theta2
    else:
        t1, t2 = phase
    return np.asarray(t1, float), np.asarray(t2, float)


def shift_matrix(q):
    """Cyclic shift K_q with entries (K)_{ij} = 1 iff j = i+1 (mod q)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    K = np.zeros((q, q), dtype=complex)
    for i in range(q):
        K[i, (i + 1) % q] = 1.0
    return K


def clock_matrix(p, q):
    """Clock matrix diag(exp(2i*pi*(j-1)*p/q)), j = 1..q."""
    if math.gcd(abs(p), q) != 1:
        raise ValueError(f"p = {p} and q = {q} must be coprime")
    return np.diag(np.exp(2j * np.pi * np.arange(q) * p / q))


def hermiticity_defect(m):
    """max |M_ij - conj(M_ji)|, the absolute deviation from Hermiticity."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def assert_hermitian(m):
    scale = 1.0 + float(np.max(np.abs(m))) if m.size else 1.0
    defect = hermiticity_defect(m)
    if defect > HERMITICITY_RTOL * scale:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    return m


def _hermitize(stack):
    return stack + np.conj(np.swapaxes(stack, -1, -2))


def kagome_bloch_stack(flux, omega, theta1, theta2):
    """Stack of 3q x 3q kagome Bloch matrices over broadcast theta arrays.

    Upper blocks (zero diagonal blocks, conjugate transposes below):
      B13 = e^{i(omega+pi p/(4q))} (e^{2i pi t1} K + e^{-i pi p/q} e^{2i pi(t1+t2)} K J)
      B15 = e^{-i(omega+pi p/(4q))} (e^{2i pi t1} K + e^{-2i pi t2} J*)
      B35 = e^{i(omega+pi p/(4q))} (e^{-i pi p/q} e^{-2i pi(t1+t2)} K^T J* + e^{-2i pi t2} J*)
    """
    flux = _as_flux(flux)
    p, q = flux.p, flux.q
    K = shift_matrix(q)
    J = clock_matrix(p, q)
    KJ = K @ J
    Jc = J.conj()
    KtJc = K.T @ Jc

    t1 = np.asarray(theta1, float)
    t2 = np.asarray(theta2, float)
    t1, t2 = np.broadcast_arrays(t1, t2)
    c = np.exp(1j * (omega + np.pi * p / (4 * q)))
    d = np.exp(-1j * np.pi * p / q)
    f1 = np.exp(2j * np.pi * t1)[..., None, None]
    f12 = np.exp(2j * np.pi * (t1 + t2))[..., None, None]
    f2c = np.exp(-2j * np.pi * t2)[..., None, None]

    M = np.zeros(t1.shape + (3 * q, 3 * q), dtype=complex)
    M[..., 0:q, q:2 * q] = c * (f1 * K + d * f12 * KJ)
    M[..., 0:q, 2 * q:] = np.conj(c) * (f1 * K + f2c * Jc)
    M[..., q:2 * q, 2 * q:] = c * (d * np.conj(f12) * KtJc + f2c * Jc)
    return _hermitize(M)


def square_bloch_stack(flux, theta1, theta2):
    """Stack of q x q matrices (e^{2i pi t1} K + e^{2i pi t2} J)/2 + h.c."""
    flux = _as_flux(flux)
    K = shift_matrix(flux.q)
    J = clock_matrix(flux.p, flux.q)
    t1 = np.asarray(theta1, float)
    t2 = np.asarray(theta2, float)
    t1, t2 = np.broadcast_arrays(t1, t2)
    f1 = np.exp(2j * np.pi * t1)[..., None, None]
    f2 = np.exp(2j * np.pi * t2)[..., None, None]
    return _hermitize(0.5 * (f1 * K + f2 * J))


def triangular_bloch_stack(flux, theta1, theta2):
    """Stack of q x q matrices with the extra e^{-i pi p/q} J K hop.

    (e^{2i pi t1} K + e^{2i pi t2} J + e^{-i pi p/q} e^{2i pi(t1+t2)} J K)/2 + h.c.
    """
    flux = _as_flux(flux)
    p, q = flux.p, flux.q
    K = shift_matrix(q)
    J = clock_matrix(p, q)
    JK = J @ K
    d = np.exp(-1j * np.pi * p / q)
    t1 = np.asarray(theta1, float)
    t2 = np.asarray(theta2, float)
    t1, t2 = np.broadcast_arrays(t1, t2)
    f1 = np.exp(2j * np.pi * t1)[..., None, None]
    f2 = np.exp(2j * np.pi * t2)[..., None, None]
    f12 = np.exp(2j * np.pi * (t1 + t2))[..., None, None]
    return _hermitize(0.5 * (f1 * K + f2 * J + d * f12 * JK))


def hexagonal_bloch_stack(flux, theta1, theta2):
    """Stack of 2q x 2q block-antidiagonal matrices.

    Off-diagonal block I + e^{2i pi t1} K + e^{-2i pi t2} J*.
    """
    flux = _as_flux(flux)
    q = flux.q
    K = shift_matrix(q)
    Jc = clock_matrix(flux.p, q).conj()
    t1 = np.asarray(theta1, float)
    t2 = np.asarray(theta2, float)
    t1, t2 = np.broadcast_arrays(t1, t2)
    f1 = np.exp(2j * np.pi * t1)[..., None, None]
    f2c = np.exp(-2j * np.pi * t2)[..., None, None]
    B = np.eye(q) + f1 * K + f2c * Jc
    M = np.zeros(t1.shape + (2 * q, 2 * q), dtype=complex)
    M[..., 0:q, q:] = B
    return _hermitize(M)


def bloch_stack(model, flux, omega, theta1, theta2):
    """Dispatch on model name; omega only enters the kagome family."""
    if model == "kagome":
        return kagome_bloch_stack(flux, omega, theta1, theta2)
    if model == "square":
        return square_bloch_stack(flux, theta1, theta2)
    if model == "triangular":
        return triangular_bloch_stack(flux, theta1, theta2)
    if model == "hexagonal":
        return hexagonal_bloch_stack(flux, theta1, theta2)
    raise ValueError(f"unknown model {model!r}")


def kagome_bloch(flux, omega, phase):
    t1, t2 = _phase_arrays(phase)
    return kagome_bloch_stack(flux, omega, t1, t2)


def square_bloch(flux, phase):
    t1, t2 = _phase_arrays(phase)
    return square_bloch_stack(flux, t1, t2)


def triangular_bloch(flux, phase):
    t1, t2 = _phase_arrays(phase)
    return triangular_bloch_stack(flux, t1, t2)


def hexagonal_bloch(flux, phase):
    t1, t2 = _phase_arrays(phase)
    return hexagonal_bloch_stack(flux, t1, t2)


def bloch_matrix(model, flux, omega, phase):
    t1, t2 = _phase_arrays(phase)
    return bloch_stack(model, flux, omega, t1, t2)


# ---------------------------------------------------------------------------
# Matrix-valued symbols


def symbol(model, x, xi, gamma=0.0, omega=0.0):
    """Evaluate the model symbol at phase-space point (x, xi); Hermitian n x n."""
    if model == "square":
        return np.array([[np.cos(x) + np.cos(xi)]], dtype=complex)
    if model == "triangular":
        return np.array([[np.cos(x) + np.cos(xi) + np.cos(x - xi)]], dtype=complex)
    if model == "hexagonal":
        w = 1.0 + np.exp(1j * x) + np.exp(1j * xi)
        return np.array([[0.0, w], [np.conj(w), 0.0]], dtype=complex)
    if model == "kagome":
        return kagome_symbol(x, xi, gamma, omega)
    raise ValueError(f"unknown model {model!r}")


def kagome_symbol(x, xi, gamma, omega):
    """The 3 x 3 kagome symbol; 2*pi-periodic in x and xi."""
    a = np.exp(1j * (omega + gamma / 8.0))
    ac = np.conj(a)
    e = np.exp
    return np.array(
        [
            [0.0, a * (e(-1j * x) + e(-1j * (x - xi))), ac * (e(-1j * x) + e(-1j * xi))],
            [ac * (e(1j * x) + e(1j * (x - xi))), 0.0, a * (e(1j * (x - xi)) + e(-1j * xi))],
            [a * (e(1j * x) + e(1j * xi)), ac * (e(-1j * (x - xi)) + e(1j * xi)), 0.0],
        ],
        dtype=complex,
    )


# Cyclic permutation intertwining the kagome symbol with the squared index
# rotation, and the sublattice swap used in the conjugation identity.
CYCLIC_PERMUTATION = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
SWAP_13 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=float)


def transpose_kappa(x, xi):
    """Transpose index rotation on phase space: (x, xi) -> (xi, -x + xi)."""
    return xi, -x + xi


SYMBOL_IDENTITIES = ("translation_x", "translation_xi", "rotation_sq", "conjugation_swap")


def verify_symbol_symmetries(samples=1000, seed=0, omega_skew=0.0):
    """Max entrywise deviation of the four kagome symbol identities.

    Random (x, xi, gamma, omega) points; `omega_skew` offsets omega on the
    transformed side only (self-test knob: a nonzero skew must be detected).
    Returns a dict identity-name -> max deviation.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    C = CYCLIC_PERMUTATION
    Cinv = C.T  # permutation matrices are orthogonal
    D = SWAP_13
    dev = dict.fromkeys(SYMBOL_IDENTITIES, 0.0)
    for _ in range(samples):
        x, xi = rng.uniform(-2 * np.pi, 2 * np.pi, 2)
        gamma = rng.uniform(-8 * np.pi, 8 * np.pi)
        omega = rng.uniform(-np.pi, np.pi)
        base = kagome_symbol(x, xi, gamma, omega)
        om2 = omega + omega_skew

        lhs = kagome_symbol(x + 2 * np.pi, xi, gamma, om2)
        dev["translation_x"] = max(dev["translation_x"], float(np.max(np.abs(lhs - base))))

        lhs = kagome_symbol(x, xi + 2 * np.pi, gamma, om2)
        dev["translation_xi"] = max(dev["translation_xi"], float(np.max(np.abs(lhs - base))))

        u, v = transpose_kappa(*transpose_kappa(x, xi))
        lhs = Cinv @ kagome_symbol(u, v, gamma, om2) @ C
        dev["rotation_sq"] = max(dev["rotation_sq"], float(np.max(np.abs(lhs - base))))

        lhs = D @ np.conj(kagome_symbol(xi, x, gamma, om2)) @ D
        dev["conjugation_swap"] = max(dev["conjugation_swap"], float(np.max(np.abs(lhs - base))))
    return dev
