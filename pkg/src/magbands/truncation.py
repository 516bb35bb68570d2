"""Finite magnetic-periodic truncation of the kagome hopping operator.

The discrete operator on l^2(Z^2; C^3) is periodized to an L1 x L2 torus of
cells (q must divide L1 so the magnetic phase e^{i*gamma*a1} is L1-periodic)
and assembled hop by hop from the expanded component equations.  This build
is deliberately independent of the clock/shift construction in `bloch`, so
matching eigenvalue multisets is a real cross-check, not a tautology.

Frozen phase-grid correspondence (calibrated once over the eight candidate
step/offset combinations; anything else leaves O(1) residuals):

    eigenvalues(truncation) ==  U  eigenvalues(M_{p,q,omega,theta1,theta2})
                         theta1 in {j/L1 : 0 <= j < L1/q},
                         theta2 in {k/L2 : 0 <= k < L2}

as multisets of size 3*L1*L2, exactly (no continuum limit involved).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import ReducedFlux, _as_flux, hermiticity_defect, kagome_bloch_stack


@dataclass
class TruncatedOperator:
    flux: ReducedFlux
    omega: float
    L1: int
    L2: int
    matrix: np.ndarray

    @property
    def dim(self):
        return 3 * self.L1 * self.L2


def build_truncated(flux, omega, L1, L2):
    """Assemble the 3*L1*L2 Hermitian truncation with periodic wrapping.

    Index layout is component-major: component c in (0, 1, 2) for sublattice
    labels (1, 3, 5), then cell (a1, a2) in row-major order.
    """
    flux = _as_flux(flux)
    if L1 < 2 or L2 < 2:
        raise ValueError("L1 and L2 must be >= 2")
    if L1 % flux.q != 0:
        raise ValueError(f"q = {flux.q} must divide L1 = {L1}")

    g = flux.gamma()
    a = np.exp(1j * (omega + g / 8.0))
    ac = np.conj(a)
    half = np.exp(-1j * g / 2.0)
    ncell = L1 * L2

    def idx(comp, a1, a2):
        return comp * ncell + (a1 % L1) * L2 + (a2 % L2)

    def ph(a1):  # magnetic hop phase e^{i*gamma*a1}; L1-periodic since q | L1
        return np.exp(1j * g * a1)

    M = np.zeros((3 * ncell, 3 * ncell), dtype=complex)
    for a1 in range(L1):
        for a2 in range(L2):
            r1 = idx(0, a1, a2)
            r3 = idx(1, a1, a2)
            r5 = idx(2, a1, a2)
            # component 1 <- 3 and 1 <- 5
            M[r1, idx(1, a1 + 1, a2)] += a
            M[r1, idx(1, a1 + 1, a2 - 1)] += a * half * ph(a1 + 1)
            M[r1, idx(2, a1 + 1, a2)] += ac
            M[r1, idx(2, a1, a2 + 1)] += ac * np.conj(ph(a1))
            # component 3 <- 1 and 3 <- 5
            M[r3, idx(0, a1 - 1, a2)] += ac
            M[r3, idx(0, a1 - 1, a2 + 1)] += ac * half * np.conj(ph(a1 - 1))
            M[r3, idx(2, a1 - 1, a2 + 1)] += a * half * np.conj(ph(a1 - 1))
            M[r3, idx(2, a1, a2 + 1)] += a * np.conj(ph(a1))
            # component 5 <- 1 and 5 <- 3
            M[r5, idx(0, a1 - 1, a2)] += a
            M[r5, idx(0, a1, a2 - 1)] += a * ph(a1)
            M[r5, idx(1, a1 + 1, a2 - 1)] += ac * half * ph(a1 + 1)
            M[r5, idx(1, a1, a2 - 1)] += ac * ph(a1)
    op = TruncatedOperator(flux, omega, L1, L2, M)
    defect = hermiticity_defect(M)
    if defect > 1e-13 * (1.0 + float(np.max(np.abs(M)))):
        raise RuntimeError(f"truncation assembly lost Hermiticity (defect {defect:.3e})")
    return op


def floquet_phase_grid(flux, L1, L2):
    """The frozen theta grid matching the truncation's Floquet sectors."""
    flux = _as_flux(flux)
    theta1 = [j / L1 for j in range(L1 // flux.q)]
    theta2 = [k / L2 for k in range(L2)]
    return theta1, theta2


def isospectrality_check(flux, omega, L1=None, L2=None):
    """Max sorted-multiset deviation between truncation and Bloch eigenvalues.

    Defaults L1 = 2q, L2 = 4.  Both multisets have size 3*L1*L2; a size
    mismatch is a construction bug and raises.
    """
    flux = _as_flux(flux)
    if L1 is None:
        L1 = 2 * flux.q
    if L2 is None:
        L2 = 4
    op = build_truncated(flux, omega, L1, L2)
    trunc_eigs = np.sort(np.linalg.eigvalsh(op.matrix))

    theta1, theta2 = floquet_phase_grid(flux, L1, L2)
    t1g, t2g = np.meshgrid(theta1, theta2, indexing="ij")
    stack = kagome_bloch_stack(flux, omega, t1g.ravel(), t2g.ravel())
    bloch_eigs = np.sort(np.linalg.eigvalsh(stack).ravel())

    if trunc_eigs.size != bloch_eigs.size:
        raise RuntimeError(
            f"multiset size mismatch: truncation {trunc_eigs.size} vs Bloch {bloch_eigs.size}"
        )
    return float(np.max(np.abs(trunc_eigs - bloch_eigs)))
