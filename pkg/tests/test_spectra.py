import math

import numpy as np
import pytest

from magbands.bloch import MODELS, ReducedFlux, bloch_stack
from magbands.spectra import (
    FACTORIZATION_CASES,
    SYMMETRY_RELATIONS,
    band_spectrum,
    charpoly_eval,
    check_symmetry,
    detect_flat_bands,
    eigenvalues,
    hausdorff_distance,
    merge_intervals,
    negate_intervals,
    run_flat_band_catalog,
    verify_factorization,
)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)
PI8 = math.pi / 8


def random_hermitian(n, rng):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (A + A.conj().T)


# --- eigenvalues -------------------------------------------------------------


def test_eigenvalues_examples():
    ev = eigenvalues(np.array([[0, 2, 2], [2, 0, 2], [2, 2, 0]], dtype=complex))
    assert np.allclose(ev, [-2, -2, 4], atol=1e-13)  # 2*(ones - I)
    assert np.allclose(eigenvalues(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])


def test_eigenvalues_trace_identity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        M = random_hermitian(30, rng)
        ev = eigenvalues(M)
        tr = float(np.trace(M).real)
        assert abs(ev.sum() - tr) < 1e-10 * max(1.0, abs(tr))


def test_eigenvalues_rejects_non_hermitian():
    with pytest.raises(ValueError):
        eigenvalues(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_eigenvalue_backward_error_via_inverse_iteration():
    rng = np.random.default_rng(1)
    for _ in range(5):
        M = random_hermitian(25, rng)
        ev = eigenvalues(M)
        fro = np.linalg.norm(M, "fro")
        for k in (0, 12, 24):
            lam = ev[k]
            v = rng.standard_normal(25) + 1j * rng.standard_normal(25)
            shifted = M - (lam + 1e-8) * np.eye(25)
            for _ in range(3):
                v = np.linalg.solve(shifted, v)
                v = v / np.linalg.norm(v)
            residual = np.linalg.norm(M @ v - lam * v)
            assert residual <= 1e-12 * fro


# --- charpoly ----------------------------------------------------------------


def test_charpoly_examples():
    M = np.array([[0, 2, 2], [2, 0, 2], [2, 2, 0]], dtype=complex)
    assert charpoly_eval(M, 0.0) == pytest.approx(-16.0, abs=1e-10)  # -det(M), det = 16
    assert charpoly_eval(np.eye(2), 1.0) == pytest.approx(0.0, abs=1e-14)


def test_charpoly_against_lu_determinant():
    rng = np.random.default_rng(2)
    for lam in (8.0, -11.0, 20.0):
        M = random_hermitian(5, rng)
        direct = float(np.linalg.det(lam * np.eye(5) - M).real)
        assert charpoly_eval(M, lam) == pytest.approx(direct, rel=1e-8)


# --- band spectra ------------------------------------------------------------


def test_band_spectrum_zero_flux_touching_bands():
    s = band_spectrum("kagome", (0, 1), 0.0, 60)
    assert [(b.lo, b.hi) for b in s.bands] == pytest.approx(
        [(-2.0, -2.0), (-2.0, 1.0), (1.0, 4.0)], abs=1e-9
    )
    assert s.merged == pytest.approx([(-2.0, 4.0)], abs=1e-9)


def test_band_spectrum_disjoint_bands():
    s = band_spectrum("kagome", (2, 1), 0.0, 60)
    assert [(b.lo, b.hi) for b in s.bands] == pytest.approx(
        [(-2 * SQRT3, -SQRT3), (0.0, 0.0), (SQRT3, 2 * SQRT3)], abs=1e-9
    )
    assert len(s.merged) == 3


def test_band_spectrum_flat_plus_four_touching():
    s = band_spectrum("kagome", (3, 2), PI8, 60)
    expected = [
        (-2.0, -2.0),
        (-2.0, -2.0),
        (1 - SQRT6, 1 - SQRT3),
        (1 - SQRT3, 1.0),
        (1.0, 1 + SQRT3),
        (1 + SQRT3, 1 + SQRT6),
    ]
    assert [(b.lo, b.hi) for b in s.bands] == pytest.approx(expected, abs=1e-6)


def test_band_count_and_sorting():
    for model in MODELS:
        s = band_spectrum(model, (1, 3), 0.1, 12)
        assert len(s.bands) == MODELS[model].blocks * 3
        for a, b in zip(s.bands, s.bands[1:]):
            assert a.lo <= b.lo + 1e-12


def test_band_spectrum_rejects_tiny_grid():
    with pytest.raises(ValueError):
        band_spectrum("square", (1, 2), 0.0, 1)


def test_eigenvalue_lipschitz_bound():
    # adjacent grid eigenvalues move at most by the matrix-difference 2-norm
    grid = 10
    thetas = np.arange(grid) / grid
    for model, pq in [("kagome", (1, 3)), ("hexagonal", (1, 2)), ("square", (1, 3))]:
        for i in range(grid - 1):
            a = bloch_stack(model, pq, 0.1, thetas[i], 0.3)
            b = bloch_stack(model, pq, 0.1, thetas[i + 1], 0.3)
            gap = np.max(np.abs(np.linalg.eigvalsh(a) - np.linalg.eigvalsh(b)))
            assert gap <= np.linalg.norm(a - b, 2) + 1e-12


def test_hexagonal_particle_hole_antisymmetry():
    rng = np.random.default_rng(3)
    for _ in range(20):
        t1, t2 = rng.random(2)
        ev = np.linalg.eigvalsh(bloch_stack("hexagonal", (1, 3), 0.0, t1, t2))
        assert np.max(np.abs(ev + ev[::-1])) < 1e-10


# --- flat bands --------------------------------------------------------------


def test_flat_band_multiplicity_three_cases():
    s = detect_flat_bands(band_spectrum("kagome", (2, 3), 0.0, 24))
    assert len(s) == 1 and s[0].multiplicity == 3
    assert s[0].value == pytest.approx(-SQRT3, abs=1e-9)

    s = detect_flat_bands(band_spectrum("kagome", (4, 3), 0.0, 24))
    assert len(s) == 1 and s[0].multiplicity == 3
    assert s[0].value == pytest.approx(-1.0, abs=1e-9)


def test_flat_band_multiplicity_six_cases():
    s = detect_flat_bands(band_spectrum("kagome", (-1, 6), PI8, 18))
    assert [f.multiplicity for f in s] == [6]
    assert s[0].value == pytest.approx(-(SQRT6 - SQRT2) / 2, abs=1e-9)

    s = detect_flat_bands(band_spectrum("kagome", (7, 6), PI8, 18))
    assert [f.multiplicity for f in s] == [6]
    assert s[0].value == pytest.approx(-(SQRT6 + SQRT2) / 2, abs=1e-9)


def test_flat_band_exactness_pointwise():
    # a flat eigenvalue is theta-independent, not merely narrow
    grid = 16
    thetas = np.arange(grid) / grid
    t1, t2 = np.meshgrid(thetas, thetas, indexing="ij")
    for (p, q), om, value in [((2, 3), 0.0, -SQRT3), ((3, 2), PI8, -2.0)]:
        ev = np.linalg.eigvalsh(bloch_stack("kagome", (p, q), om, t1.ravel(), t2.ravel()))
        hit = np.abs(ev - value) < 1e-7
        assert hit.any(axis=1).all()
        flagged = np.where(np.abs(ev - value) < 1e-7, ev, np.nan)
        assert np.nanstd(flagged) < 1e-10


def test_flat_band_catalog_runner():
    res = run_flat_band_catalog("0", grid=24)
    assert [r["ok"] for r in res] == [True] * 4
    assert [r["multiplicity"] for r in res] == [1, 1, 3, 3]


# --- interval utilities ------------------------------------------------------


def test_merge_intervals_touching_and_disjoint():
    assert merge_intervals([(0, 1), (1 + 5e-10, 2), (3, 4)]) == [(0, 2), (3, 4)]
    assert merge_intervals([(3, 4), (0, 1)]) == [(0, 1), (3, 4)]


def test_hausdorff_distance_basics():
    assert hausdorff_distance([(0, 1)], [(0, 1)]) == 0.0
    assert hausdorff_distance([(0, 1)], [(0.5, 1.5)]) == pytest.approx(0.5)
    # gap midpoint inside the other set matters: E = [0,10], F = {0} u {10}
    assert hausdorff_distance([(0, 10)], [(0, 0), (10, 10)]) == pytest.approx(5.0)
    assert negate_intervals([(1, 2), (-4, -3)]) == [(-2, -1), (3, 4)]


# --- symmetry relations ------------------------------------------------------


def test_symmetry_relation_examples():
    r = check_symmetry("kagtrans", (1, 3), 0.0, 18)
    assert r.passed and r.deviation < 1e-9
    r = check_symmetry("kagreflex4", (1, 3), 0.0, 18)
    assert r.passed and r.deviation < 1e-9
    r = check_symmetry("gammatrans", (1, 2), 0.1 + math.pi / 4, 18)
    assert r.passed and r.deviation < 1e-9


def test_symmetry_relation_transforms_match_examples():
    # (1,3) translates to (25,3); reflex4 negates against (13,3)
    rel = SYMMETRY_RELATIONS["kagtrans"]
    assert rel.transform(1, 3, 0.0)[:2] == (25, 3)
    rel = SYMMETRY_RELATIONS["kagreflex4"]
    assert rel.transform(1, 3, 0.0)[:2] == (13, 3) and rel.negate


def test_unknown_relation_rejected():
    with pytest.raises(KeyError):
        check_symmetry("nope", (1, 2), 0.0, 6)


@pytest.mark.parametrize("rid", sorted(SYMMETRY_RELATIONS))
def test_every_relation_passes_smoke(rid):
    r = check_symmetry(rid, (1, 3), 0.1, 12)
    assert r.passed, f"{rid} deviation {r.deviation}"


# --- factorizations ----------------------------------------------------------


def test_factorization_handcomputed_point():
    # case (0,1), theta = (0,0), lambda = 0: both sides are -16
    case = FACTORIZATION_CASES["0,1"]
    assert case.rhs(0.0, 0.0, 0.0) == pytest.approx(-16.0)
    M = bloch_stack("kagome", ReducedFlux(0, 1), 0.0, 0.0, 0.0)
    assert charpoly_eval(M, 0.0) == pytest.approx(-16.0, abs=1e-12)


def test_factorization_fixed_phase():
    assert verify_factorization("2,1", phase=(0.3, 0.7), lambda_samples=50) < 1e-8


@pytest.mark.parametrize("cid", sorted(FACTORIZATION_CASES))
def test_factorization_cases_random_phase(cid):
    assert verify_factorization(cid, lambda_samples=60, seed=5) < 1e-7


def test_unknown_factorization_case_rejected():
    with pytest.raises(KeyError):
        verify_factorization("5,7")
