"""
Static SVG figures: one horizontal row of bars per construction level.

Output is assembled from string parts with fixed number formatting, so the
same inputs always give the same bytes.
"""

from fractions import Fraction
from typing import List, Literal, Sequence, Tuple
from xml.sax.saxutils import escape

from .boundary_geometry import copy_extent, diameter
from .exact_numerics import IntervalSet
from .ifs_engine import build_ifs, inner_approx, iterate_levels

Target = Literal["levels", "boundary", "brackets"]

WIDTH = 960
MARGIN = 80
ROW_HEIGHT = 28
BAR_HEIGHT = 16
MIN_BAR = 0.25
FONT = "Helvetica, Arial, sans-serif"


def _x(value: Fraction, span: Fraction) -> float:
    return MARGIN + float(value / span) * (WIDTH - 2 * MARGIN)


def _bar(lo: Fraction, hi: Fraction, span: Fraction, row: int, level: int, css: str = "bar") -> str:
    x0 = _x(lo, span)
    width = max(_x(hi, span) - x0, MIN_BAR)
    y = 20 + row * ROW_HEIGHT
    return (
        f'<rect class="{css}" data-level="{level}" x="{x0:.3f}" y="{y}" '
        f'width="{width:.3f}" height="{BAR_HEIGHT}"/>'
    )


def _label(text: str, row: int) -> str:
    y = 20 + row * ROW_HEIGHT + BAR_HEIGHT - 3
    return f'<text x="8" y="{y}" font-family="{escape(FONT)}" font-size="12">{escape(text)}</text>'


def _document(title: str, rows: int, body: List[str]) -> str:
    height = 40 + rows * ROW_HEIGHT
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}">',
        f"<title>{escape(title)}</title>",
        "<style>.bar{fill:#1f4e79}.inner{fill:#c0392b}.outer{fill:#1f4e79}</style>",
        *body,
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def _rows(sets: Sequence[Tuple[str, int, IntervalSet, str]], span: Fraction) -> List[str]:
    body = []
    for row, (label, level, s, css) in enumerate(sets):
        body.append(_label(label, row))
        body.extend(_bar(iv.lo, iv.hi, span, row, level, css) for iv in s)
    return body


def render_levels(m: int, n: int, budget: int | None = None) -> str:
    """W^0(I) .. W^n(I), level 0 on top."""
    sys = build_ifs(m)
    levels = iterate_levels(sys, n, budget)
    rows = [(f"n={k}", k, s, "bar") for k, s in enumerate(levels)]
    return _document(f"W^n(I) for m={m}, n=0..{n}", len(rows), _rows(rows, sys.diameter))


def render_boundary(m: int, levels: int) -> str:
    """Row n holds the two boundary copies C_n^l and C_n^r."""
    body = []
    span = diameter(m)
    for row, n in enumerate(range(1, levels + 1)):
        body.append(_label(f"n={n}", row))
        for side in ("left", "right"):
            iv = copy_extent(m, side, n)
            body.append(_bar(iv.lo, iv.hi, span, row, n))
    return _document(f"boundary copies for m={m}, n=1..{levels}", levels, body)


def render_brackets(m: int, depth: int, budget: int | None = None) -> str:
    """
    Inner and outer approximations at `depth` on two aligned tracks.

    Raises:
            ValueError: if the inner approximation is not inside the outer one.
    """
    sys = build_ifs(m)
    inner = inner_approx(sys, depth, budget)
    outer = iterate_levels(sys, depth, budget)[-1]
    if not inner.issubset(outer):
        raise ValueError(f"inner approximation escapes W^{depth}(I) for m={m}")
    rows = [("outer", depth, outer, "outer"), ("inner", depth, inner, "inner")]
    return _document(f"inner/outer approximations for m={m}, depth {depth}", 2, _rows(rows, sys.diameter))


def render_svg(target: Target, m: int, level: int, budget: int | None = None) -> str:
    if target == "levels":
        return render_levels(m, level, budget)
    if target == "boundary":
        return render_boundary(m, level)
    if target == "brackets":
        return render_brackets(m, level, budget)
    raise ValueError(f"unknown render target {target!r}; expected levels, boundary or brackets")
