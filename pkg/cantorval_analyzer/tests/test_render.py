import re

import pytest

from cantorval_analyzer.src.render import render_boundary, render_brackets, render_levels, render_svg

BAR = re.compile(r'<rect class="(\w+)" data-level="(\d+)" x="([0-9.]+)" y="\d+" width="([0-9.]+)"')


def _bars(svg):
    return [(css, int(level), float(x), float(w)) for css, level, x, w in BAR.findall(svg)]


def test_levels_figure():
    svg = render_levels(1, 4)
    bars = _bars(svg)
    assert svg.startswith("<svg ")
    assert sorted({level for _, level, _, _ in bars}) == [0, 1, 2, 3, 4]
    top = [b for b in bars if b[1] == 0]
    assert len(top) == 1
    assert top[0][2] == 80.0
    assert top[0][3] == 800.0
    assert len([b for b in bars if b[1] == 4]) == 81


def test_output_is_deterministic():
    assert render_levels(2, 3) == render_levels(2, 3)
    assert render_svg("boundary", 1, 4) == render_boundary(1, 4)


def test_boundary_figure_is_symmetric():
    bars = _bars(render_boundary(1, 4))
    assert len(bars) == 8
    for n in range(1, 5):
        left, right = [b for b in bars if b[1] == n]
        # mirror image about x = 5/6, the middle of the viewport
        assert left[2] + left[3] + right[2] == pytest.approx(960.0, abs=0.01)


def test_brackets_figure():
    svg = render_brackets(1, 4)
    css = {c for c, _, _, _ in _bars(svg)}
    assert css == {"inner", "outer"}
    assert "depth 4" in svg


def test_unknown_target():
    with pytest.raises(ValueError):
        render_svg("spiral", 1, 2)
