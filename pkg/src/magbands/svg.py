"""Standalone SVG rendering of butterfly datasets.

One <line> element per dataset row (a band drawn as a segment at its flux),
axes drawn with <path> so the segment count stays exactly the row count.
Flat bands (width below 1e-9) can be emphasized with <circle> dots.
"""

from __future__ import annotations

from .bloch import MODELS

FLAT_DOT_TOL = 1e-9


def _fnum(x):
    return format(float(x), ".4f")


def render_svg(ds, path, width=900, height=600, transpose=False, flat_highlight=False):
    """Render the dataset to `path` as a standalone SVG file.

    Default orientation: flux gamma/(2*pi) on the horizontal axis over
    [0, period], energy on the vertical axis over the model's range;
    `transpose` swaps the two.
    """
    if not ds.rows:
        raise ValueError("cannot render an empty dataset")
    info = MODELS[ds.model]
    period = float(info.flux_period)
    bound = info.energy_bound
    margin = 46.0
    iw = width - 2 * margin
    ih = height - 2 * margin

    def to_px(flux_frac, energy):
        u, v = (flux_frac / period, (energy + bound) / (2 * bound))
        if transpose:
            u, v = v, u
        return margin + u * iw, height - margin - v * ih

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{ds.model} bands vs flux (omega={ds.omega:g})</title>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        # axes frame
        f'<path d="M {_fnum(margin)} {_fnum(margin)} H {_fnum(width - margin)} '
        f"V {_fnum(height - margin)} H {_fnum(margin)} Z\" "
        'fill="none" stroke="#444" stroke-width="1"/>',
        '<g stroke="#1f3f77" stroke-width="1.1" stroke-linecap="round">',
    ]
    dots = []
    for p, q, _k, lo, hi in ds.rows:
        frac = p / q
        x1, y1 = to_px(frac, lo)
        x2, y2 = to_px(frac, hi)
        parts.append(
            f'<line x1="{_fnum(x1)}" y1="{_fnum(y1)}" x2="{_fnum(x2)}" y2="{_fnum(y2)}"/>'
        )
        if flat_highlight and hi - lo < FLAT_DOT_TOL:
            dots.append((x1, y1))
    parts.append("</g>")
    if dots:
        parts.append('<g fill="#c0392b">')
        for cx, cy in dots:
            parts.append(f'<circle cx="{_fnum(cx)}" cy="{_fnum(cy)}" r="3.2"/>')
        parts.append("</g>")
    parts.append("</svg>")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as err:
        raise OSError(f"failed writing SVG to {path}: {err}") from err
    return path
