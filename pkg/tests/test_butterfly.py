import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from magbands.butterfly import (
    ButterflyDataset,
    export_csv,
    export_json,
    flux_list,
    read_csv,
    read_json,
    resolve_threads,
    sweep,
)
from magbands.svg import render_svg

SQRT3 = math.sqrt(3.0)


def test_flux_list_periods():
    assert flux_list("kagome", 1) == [(p, 1) for p in range(8)]
    assert flux_list("square", 2) == [(0, 1), (1, 2)]
    assert flux_list("triangular", 1) == [(0, 1), (1, 1)]
    for model in ("kagome", "square", "triangular", "hexagonal"):
        for p, q in flux_list(model, 6):
            assert math.gcd(p, q) == 1


@pytest.fixture(scope="module")
def kagome_q1():
    return sweep("kagome", omega=0.0, qmax=1, grid=60, parallelism=1)


def test_kagome_qmax1_sweep_shape(kagome_q1):
    ds = kagome_q1
    assert len(ds.rows) == 24  # 8 flux values x 3 bands
    assert [r[:2] for r in ds.rows] == [(p, 1) for p in range(8) for _ in range(3)]
    assert all(r[3] <= r[4] for r in ds.rows)


def test_kagome_qmax1_reproduces_band_catalog(kagome_q1):
    by_flux = {}
    for p, q, k, lo, hi in kagome_q1.rows:
        by_flux.setdefault(p, []).append((lo, hi))
    assert np.allclose(by_flux[0], [(-2.0, -2.0), (-2.0, 1.0), (1.0, 4.0)], atol=1e-9)
    assert np.allclose(by_flux[2], [(-2 * SQRT3, -SQRT3), (0.0, 0.0), (SQRT3, 2 * SQRT3)], atol=1e-9)


def test_kagome_qmax1_flat_rows(kagome_q1):
    # theta-independent eigenvalues at p = 0, 2, 4, 6 with values -2, 0, 2, 0
    flats = {(r[0], r[2]): r[3] for r in kagome_q1.flat_rows()}
    assert set(flats) == {(0, 1), (2, 2), (4, 3), (6, 2)}
    assert flats[(0, 1)] == pytest.approx(-2.0, abs=1e-9)
    assert flats[(2, 2)] == pytest.approx(0.0, abs=1e-9)
    assert flats[(4, 3)] == pytest.approx(2.0, abs=1e-9)
    assert flats[(6, 2)] == pytest.approx(0.0, abs=1e-9)


def test_square_sweep_band_counts():
    ds = sweep("square", omega=0.0, qmax=2, grid=12, parallelism=1)
    per_flux = {}
    for p, q, k, lo, hi in ds.rows:
        per_flux.setdefault((p, q), 0)
        per_flux[(p, q)] += 1
    assert per_flux == {(0, 1): 1, (1, 2): 2}  # q bands per fraction


def test_sweep_deterministic_across_threads(tmp_path):
    a = sweep("kagome", omega=0.0, qmax=2, grid=12, parallelism=1)
    b = sweep("kagome", omega=0.0, qmax=2, grid=12, parallelism=8)
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    export_csv(a, pa)
    export_csv(b, pb)
    assert pa.read_bytes() == pb.read_bytes()


def test_csv_roundtrip_and_format(tmp_path, kagome_q1):
    path = tmp_path / "k.csv"
    export_csv(kagome_q1, path)
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    assert lines[0] == "model,p,q,gamma_over_2pi,omega,band_index,band_lo,band_hi"
    assert len([ln for ln in lines if ln]) == 25  # header + 24 rows
    assert "\r" not in text
    back = read_csv(path)
    assert back.model == kagome_q1.model
    assert back.omega == kagome_q1.omega
    assert back.rows == kagome_q1.rows


def test_csv_17_digit_fidelity(tmp_path):
    rows = [(1, 3, 1, -1.2345678901234567, 0.9876543210987654)]
    ds = ButterflyDataset(model="kagome", omega=math.pi / 8, grid=12, rows=rows, manifest={})
    path = tmp_path / "f.csv"
    export_csv(ds, path)
    back = read_csv(path)
    assert back.rows == rows
    assert back.omega == math.pi / 8


def test_json_roundtrip(tmp_path, kagome_q1):
    path = tmp_path / "k.json"
    export_json(kagome_q1, path)
    back = read_json(path)
    assert back.rows == kagome_q1.rows
    assert back.manifest == kagome_q1.manifest
    for key in ("tool", "version", "model", "omega", "qmax", "grid", "generated"):
        assert key in back.manifest


def test_export_surfaces_path_errors(tmp_path, kagome_q1):
    bad = tmp_path / "nope" / "x.csv"
    with pytest.raises(OSError, match="nope"):
        export_csv(kagome_q1, bad)
    with pytest.raises(OSError, match="nope"):
        export_json(kagome_q1, bad)


def test_resolve_threads_env_override(monkeypatch):
    monkeypatch.delenv("BUTTERFLY_THREADS", raising=False)
    assert resolve_threads(3) == 3
    assert resolve_threads("auto") >= 1
    monkeypatch.setenv("BUTTERFLY_THREADS", "5")
    assert resolve_threads(3) == 5


# --- SVG ---------------------------------------------------------------------


def test_svg_segment_and_dot_counts(tmp_path, kagome_q1):
    path = tmp_path / "k.svg"
    render_svg(kagome_q1, path, flat_highlight=True)
    root = ET.parse(path).getroot()  # must be well-formed XML
    ns = "{http://www.w3.org/2000/svg}"
    lines = root.iter(f"{ns}line")
    circles = root.iter(f"{ns}circle")
    assert len(list(lines)) == len(kagome_q1.rows)
    # flat bands at p = 0, 2, 4, 6 for the q = 1 sweep
    assert len(list(circles)) == 4


def test_svg_without_highlight_has_no_dots(tmp_path, kagome_q1):
    path = tmp_path / "plain.svg"
    render_svg(kagome_q1, path, flat_highlight=False)
    root = ET.parse(path).getroot()
    assert len(list(root.iter("{http://www.w3.org/2000/svg}circle"))) == 0


def test_svg_transpose_swaps_extents(tmp_path, kagome_q1):
    p1 = tmp_path / "n.svg"
    p2 = tmp_path / "t.svg"
    render_svg(kagome_q1, p1, width=800, height=500)
    render_svg(kagome_q1, p2, width=800, height=500, transpose=True)
    ns = "{http://www.w3.org/2000/svg}"
    xs1 = {ln.get("x1") for ln in ET.parse(p1).getroot().iter(f"{ns}line")}
    ys2 = {ln.get("y1") for ln in ET.parse(p2).getroot().iter(f"{ns}line")}
    # default: segments vertical (x1 == x2); transposed: horizontal
    for ln in ET.parse(p1).getroot().iter(f"{ns}line"):
        assert ln.get("x1") == ln.get("x2")
    for ln in ET.parse(p2).getroot().iter(f"{ns}line"):
        assert ln.get("y1") == ln.get("y2")
    assert len(xs1) == 8 and len(ys2) == 8  # one abscissa per flux value


def test_svg_rejects_empty_dataset(tmp_path):
    ds = ButterflyDataset(model="kagome", omega=0.0, grid=12, rows=[], manifest={})
    with pytest.raises(ValueError):
        render_svg(ds, tmp_path / "e.svg")


def test_dataset_reflection_smoke():
    # kagome omega=0 dataset: point reflection through (gamma, e) = (4*pi, 0),
    # i.e. the spectrum at 4q - p is the negation of the spectrum at p
    from magbands.spectra import hausdorff_distance, merge_intervals, negate_intervals

    ds = sweep("kagome", omega=0.0, qmax=2, grid=12, parallelism=1)
    by_flux = {}
    for p, q, k, lo, hi in ds.rows:
        by_flux.setdefault((p, q), []).append((lo, hi))
    checked = 0
    for (p, q), bands in by_flux.items():
        p2 = 4 * q - p
        if (p2, q) not in by_flux:
            continue
        lhs = merge_intervals(bands)
        rhs = negate_intervals(merge_intervals(by_flux[(p2, q)]))
        assert hausdorff_distance(lhs, rhs) < 1e-6
        checked += 1
    assert checked >= 8
