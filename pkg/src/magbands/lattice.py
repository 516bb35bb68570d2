"""Kagome lattice geometry.

The kagome lattice is the union of three translated copies of the triangular
lattice spanned by {2*nu_1, 2*nu_2}, with one site per sublattice label
l in {1, 3, 5} in every cell:

    site(alpha, l) = 2*alpha_1*nu_1 + 2*alpha_2*nu_2 + nu_l

where nu_j is the unit vector at angle (j-1)*pi/3.  Cell indices alpha live
in Z^2; the index map kappa represents the pi/3 rotation in that basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT3 = math.sqrt(3.0)

# nu_j = r^(j-1) (1, 0), r = rotation by pi/3; exact components, keyed mod 6.
_NU = {
    1: (1.0, 0.0),
    2: (0.5, SQRT3 / 2),
    3: (-0.5, SQRT3 / 2),
    4: (-1.0, 0.0),
    5: (-0.5, -SQRT3 / 2),
    0: (0.5, -SQRT3 / 2),  # j = 6
}

SUBLATTICE_LABELS = (1, 3, 5)

# Rotation by pi/3 about the origin.
ROT60 = np.array([[0.5, -SQRT3 / 2], [SQRT3 / 2, 0.5]])


def nu(j):
    """Unit basis vector nu_j for any integer j (taken mod 6)."""
    return np.array(_NU[j % 6])


def kappa(alpha):
    """Index rotation (a1, a2) -> (-a2, a1 + a2); kappa^6 is the identity."""
    a1, a2 = alpha
    return (-a2, a1 + a2)


def kappa_power(alpha, m):
    """Apply kappa m times (m may be negative; kappa^3 = -id)."""
    a = tuple(alpha)
    m = m % 6
    for _ in range(m):
        a = kappa(a)
    return a


def wedge(a, b):
    """Index cross product a1*b2 - a2*b1 (invariant under kappa)."""
    return a[0] * b[1] - a[1] * b[0]


def cell_step(j):
    """Integer cell coordinates of 2*nu_j in the basis {2*nu_1, 2*nu_2}."""
    return kappa_power((1, 0), j - 1)


@dataclass(frozen=True)
class LatticePoint:
    """One kagome site: cell index alpha and sublattice label in {1, 3, 5}."""

    alpha: tuple
    ell: int

    def __post_init__(self):
        if self.ell not in SUBLATTICE_LABELS:
            raise ValueError(f"sublattice label must be in {SUBLATTICE_LABELS}, got {self.ell}")
        object.__setattr__(self, "alpha", (int(self.alpha[0]), int(self.alpha[1])))

    def cartesian(self):
        a1, a2 = self.alpha
        return 2 * a1 * nu(1) + 2 * a2 * nu(2) + nu(self.ell)


def enumerate_points(shell_radius):
    """All sites with max(|a1|, |a2|) <= shell_radius; 3*(2r+1)^2 points."""
    if shell_radius < 0:
        raise ValueError("shell_radius must be >= 0")
    r = int(shell_radius)
    return [
        LatticePoint((a1, a2), ell)
        for a1 in range(-r, r + 1)
        for a2 in range(-r, r + 1)
        for ell in SUBLATTICE_LABELS
    ]


def nearest_neighbors(point):
    """The four sites at Euclidean distance 1 from `point`.

    For label j they carry labels j-2 and j+2 (mod 6, staying odd), two each,
    at cell offsets +2*nu~_j, -2*nu~_{j-2}, +2*nu~_j, -2*nu~_{j+2} where
    2*nu~_j = cell_step(j).
    """
    a = point.alpha
    j = point.ell

    def shift(base, step, sign):
        return (base[0] + sign * step[0], base[1] + sign * step[1])

    lo = (j - 2) % 6
    hi = (j + 2) % 6
    return [
        LatticePoint(shift(a, cell_step(j), +1), lo),
        LatticePoint(shift(a, cell_step(lo), -1), lo),
        LatticePoint(shift(a, cell_step(j), +1), hi),
        LatticePoint(shift(a, cell_step(hi), -1), hi),
    ]


def rotate_point(point):
    """Image of a site under the pi/3 rotation about the origin.

    r maps site (alpha, l) to (kappa(alpha) + cell_step(l+1), l+4 mod 6);
    applying it twice gives the clean 2*pi/3 form (kappa^2(alpha), l+2).
    """
    a = kappa(point.alpha)
    s = cell_step(point.ell + 1)
    return LatticePoint((a[0] + s[0], a[1] + s[1]), (point.ell + 4 - 1) % 6 + 1)
