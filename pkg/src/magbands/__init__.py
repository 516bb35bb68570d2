"""Magnetic Bloch bands and Hofstadter butterflies for four lattice models:
square, triangular, hexagonal, and kagome (the one with flat bands)."""

__version__ = "0.1.0"

from .bloch import (  # noqa: F401
    MODELS,
    BlochPhase,
    ReducedFlux,
    bloch_matrix,
    clock_matrix,
    hexagonal_bloch,
    kagome_bloch,
    shift_matrix,
    square_bloch,
    symbol,
    triangular_bloch,
    verify_symbol_symmetries,
)
from .butterfly import ButterflyDataset, export_csv, export_json, read_csv, read_json, sweep  # noqa: F401
from .lattice import LatticePoint, enumerate_points, kappa, nearest_neighbors, nu  # noqa: F401
from .potential import KagomePotential, harmonic_ground_energy, mu, verify_wells  # noqa: F401
from .spectra import (  # noqa: F401
    band_spectrum,
    charpoly_eval,
    check_symmetry,
    detect_flat_bands,
    eigenvalues,
    run_flat_band_catalog,
    verify_factorization,
)
from .svg import render_svg  # noqa: F401
from .truncation import build_truncated, isospectrality_check  # noqa: F401
